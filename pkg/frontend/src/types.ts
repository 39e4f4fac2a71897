/**
 * Payload shapes the gateway serves. Every number the UI shows comes
 * straight from these fields; the frontend never computes voltages.
 */

export interface PhaseVoltage {
  magnitude_pu: number;
  angle_deg: number;
}

export interface BusVoltageEntry {
  per_unit: number;
  phases?: Record<string, PhaseVoltage>;
}

export interface VoltageLimits {
  lower: number;
  upper: number;
}

export interface ToolEnvelope {
  success: boolean;
  tool: string;
  data: Record<string, unknown>;
  hint?: string;
  elapsed_ms: number;
}

export interface ChatTurn {
  role: "user" | "assistant" | "tool";
  text?: string;
  tool_calls?: { tool: string; args: Record<string, unknown> }[];
  tool_result?: ToolEnvelope;
}

export interface SessionSummary {
  id: string;
  version: number;
  circuit: string | null;
  provider: string | null;
  model: string | null;
  profile: string | null;
  turn_count: number;
}

export interface QstsViolation {
  step: number;
  bus: string;
  voltage_pu: number;
  kind: "under" | "over";
}

export interface QstsSummary {
  steps: number;
  step_hours: number;
  min_voltage_pu: number | null;
  min_voltage_bus: string | null;
  min_voltage_step: number | null;
  max_voltage_pu: number | null;
  max_voltage_bus: string | null;
  max_voltage_step: number | null;
  violation_count: number;
  violation_step_count: number;
  violation_steps: number[];
  total_energy_loss_kwh: number;
  total_energy_loss_kvarh: number;
  diverged_at: number | null;
}

export interface QstsResult {
  schema_version: number;
  steps: number;
  step_hours: number;
  limits_pu: VoltageLimits;
  bus_ids: string[];
  voltages_pu: Record<string, number>[];
  loss_kw: number[];
  loss_kvar: number[];
  violations: QstsViolation[];
  diverged_at: number | null;
  summary: QstsSummary;
}

export interface TopologyNode {
  id: string;
  coord: [number, number] | null;
  base_kv: number;
  element_kind: "source" | "regulator" | "capacitor" | "load" | "junction";
}

export interface TopologyEdge {
  from: string;
  to: string;
  branch: string;
}

export interface TopologyPayload {
  nodes: TopologyNode[];
  edges: TopologyEdge[];
  voltages_pu?: Record<string, number>;
}

export const DEFAULT_LIMITS: VoltageLimits = { lower: 0.95, upper: 1.05 };
