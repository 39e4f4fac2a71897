"use strict";
/**
 * Payload shapes the gateway serves. Every number the UI shows comes
 * straight from these fields; the frontend never computes voltages.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.DEFAULT_LIMITS = void 0;
exports.DEFAULT_LIMITS = { lower: 0.95, upper: 1.05 };
