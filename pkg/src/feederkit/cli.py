"""Headless command-line entry point.

Every numeric value printed comes out of a tool envelope; --json emits
the raw envelopes exactly as dispatched. Exit codes: 0 success,
2 validation failure, 3 engine failure, 4 adapter failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .agent import scripted_adapter, tool_use_loop
from .gateway import GatewayApp, GatewayConfig, make_http_server
from .mcp import EngineSession, McpServer, build_system_prompt
from .mcp.transports import serve_http, serve_stdio

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_ENGINE = 3
EXIT_ADAPTER = 4


class CliRun:
    """Collects envelopes so --json output is exactly what was dispatched."""

    def __init__(self, session: EngineSession, json_mode: bool, strict: bool,
                 out=None):
        self.session = session
        self.json_mode = json_mode
        self.strict = strict
        self.envelopes = []
        self.out = out or sys.stdout
        self.exit_code = EXIT_OK

    def call(self, tool: str, args: dict | None = None):
        envelope = self.session.dispatch(tool, args or {})
        self.envelopes.append(envelope)
        if not envelope.success:
            code = (
                EXIT_VALIDATION
                if "schema_violation" in envelope.data
                else EXIT_ENGINE
            )
            self.exit_code = max(self.exit_code, code)
        return envelope

    def print(self, text: str = "") -> None:
        if not self.json_mode:
            print(text, file=self.out)

    def finish(self) -> int:
        if self.json_mode:
            print(self.emit_json(), file=self.out)
        failed = [e for e in self.envelopes if not e.success]
        if not failed:
            return EXIT_OK
        if self.strict or len(failed) == len(self.envelopes):
            return self.exit_code
        return EXIT_OK

    def emit_json(self) -> str:
        return json.dumps([e.to_dict() for e in self.envelopes], indent=2)


def _load_package(run: CliRun, package: str) -> bool:
    """Library name or package directory path."""
    path = Path(package)
    if path.is_dir():
        run.session.whitelist_root = path.resolve().parent
        envelope = run.call("load_circuit", {"path": path.name})
    else:
        envelope = run.call("load_library_circuit", {"name": package})
    if not envelope.success:
        run.print(f"error: {envelope.data.get('error')}")
        run.print(f"hint: {envelope.hint}")
        return False
    run.print(
        f"loaded {envelope.data['name']}: {envelope.data['buses']} buses, "
        f"{envelope.data['lines']} lines, {envelope.data['loads']} loads"
    )
    return True


def cmd_solve(args, out=None) -> int:
    run = CliRun(EngineSession(), args.json, args.strict, out)
    if not _load_package(run, args.package):
        return run.finish() or EXIT_ENGINE
    solve = run.call("solve_power_flow")
    if not solve.success:
        run.print(f"error: {solve.data.get('error')}")
        return run.finish() or EXIT_ENGINE
    volts = run.call("get_all_bus_voltages")
    run.print(
        f"converged in {solve.data['iterations']} iterations; "
        f"losses {solve.data['total_loss']['kw']:.2f} kW / "
        f"{solve.data['total_loss']['kvar']:.2f} kvar"
    )
    run.print()
    run.print(f"{'bus':>8}  {'voltage (pu)':>12}  status")
    limits = volts.data["limits_pu"]
    for bus in sorted(volts.data["voltages"]):
        v = volts.data["voltages"][bus]["per_unit"]
        if v < limits["lower"]:
            status = "UNDER"
        elif v > limits["upper"]:
            status = "OVER"
        else:
            status = "ok"
        run.print(f"{bus:>8}  {v:>12.4f}  {status}")
    return run.finish()


def _assign_profile_everywhere(run: CliRun, profile: str) -> bool:
    info = run.call("get_circuit_info")
    if not info.success:
        return False
    for load in run.session.circuit.loads:
        envelope = run.call(
            "assign_loadshape", {"load_id": load.id, "shape_name": profile}
        )
        if not envelope.success:
            run.print(f"error: {envelope.data.get('error')}")
            run.print(f"hint: {envelope.hint}")
            return False
    return True


def cmd_qsts(args, out=None) -> int:
    run = CliRun(EngineSession(), args.json, args.strict, out)
    if not _load_package(run, args.package):
        return run.finish() or EXIT_ENGINE
    if args.profile and not _assign_profile_everywhere(run, args.profile):
        return run.finish() or EXIT_VALIDATION
    result = run.call("run_qsts", {"steps": args.steps,
                                   "step_hours": args.step_hours})
    if not result.success:
        run.print(f"error: {result.data.get('error')}")
        return run.finish() or EXIT_ENGINE
    summary = run.call("get_qsts_summary").data["summary"]
    run.print(
        f"{summary['steps']} steps x {summary['step_hours']} h; "
        f"min {summary['min_voltage_pu']:.4f} pu at bus "
        f"{summary['min_voltage_bus']} (step {summary['min_voltage_step']}); "
        f"max {summary['max_voltage_pu']:.4f} pu at bus "
        f"{summary['max_voltage_bus']}"
    )
    run.print(
        f"violations: {summary['violation_count']} across "
        f"{summary['violation_step_count']} steps; energy losses "
        f"{summary['total_energy_loss_kwh']:.1f} kWh"
    )
    return run.finish()


def cmd_skill(args, out=None) -> int:
    run = CliRun(EngineSession(), args.json, args.strict, out)
    if not _load_package(run, args.package):
        return run.finish() or EXIT_ENGINE
    config = {}
    if args.seed is not None:
        config["seed"] = args.seed
    envelope = run.call(
        "invoke_skill", {"skill_name": args.name, "config": config}
    )
    if not envelope.success:
        run.print(f"error: {envelope.data.get('error')}")
        run.print(f"hint: {envelope.hint}")
        return run.finish() or EXIT_ENGINE
    report = envelope.data["report"]
    run.print(f"skill {report['skill']}: {report['status']} "
              f"({len(report['tool_calls'])} tool calls, "
              f"{report['iterations']} iterations)")
    before, after = report["metrics_before"], report["metrics_after"]
    run.print(f"violations: {before['violation_count']} -> {after['violation_count']}")
    for item in report["recommendations"]:
        run.print(f"  - {item}")
    return run.finish()


def cmd_chat(args, out=None) -> int:
    run = CliRun(EngineSession(), args.json, args.strict, out)
    if not _load_package(run, args.package):
        return run.finish() or EXIT_ENGINE
    try:
        transcript = json.loads(Path(args.script).read_text())
    except (OSError, json.JSONDecodeError) as err:
        run.print(f"error: cannot read transcript: {err}")
        return EXIT_VALIDATION
    adapter = scripted_adapter(transcript)
    result = tool_use_loop(
        adapter, run.session, args.text,
        system_prompt=build_system_prompt(run.session),
        max_rounds=args.max_rounds,
    )
    for turn in result.turns:
        if turn.role == "tool":
            run.envelopes.append(_EnvelopeView(turn.tool_result))
    if args.json:
        print(json.dumps(result.to_dict(), indent=2), file=out or sys.stdout)
    else:
        for turn in result.turns:
            if turn.role == "assistant" and turn.tool_calls:
                for call in turn.tool_calls:
                    run.print(f"[tool call] {call['tool']} {json.dumps(call['args'])}")
            elif turn.role == "tool":
                envelope = turn.tool_result
                status = "ok" if envelope["success"] else "FAILED"
                run.print(f"[result]    {envelope['tool']}: {status}")
            elif turn.role == "assistant":
                run.print(f"assistant: {turn.text}")
    if result.status == "adapter_unavailable":
        return EXIT_ADAPTER
    if result.status in ("retry_exhausted",) and args.strict:
        return EXIT_VALIDATION
    return EXIT_OK


class _EnvelopeView:
    """Adapts a stored envelope dict to the CliRun envelope interface."""

    def __init__(self, data: dict):
        self._data = data
        self.success = data.get("success", False)
        self.data = data.get("data", {})
        self.hint = data.get("hint")

    def to_dict(self) -> dict:
        return self._data


def cmd_export(args, out=None) -> int:
    # progress chatter goes to stderr so stdout is exactly the export text
    run = CliRun(EngineSession(), False, args.strict, sys.stderr)
    if not _load_package(run, args.package):
        return EXIT_ENGINE
    if args.profile and not _assign_profile_everywhere(run, args.profile):
        return EXIT_VALIDATION
    result = run.call("run_qsts", {"steps": args.steps})
    if not result.success:
        print(f"error: {result.data.get('error')}", file=sys.stderr)
        return EXIT_ENGINE
    export = run.call("export_results", {"format": args.format})
    if not export.success:
        print(f"error: {export.data.get('error')}", file=sys.stderr)
        return EXIT_VALIDATION
    print(export.data["content"], file=out or sys.stdout, end="")
    return EXIT_OK


def cmd_serve_mcp(args, out=None) -> int:
    server = McpServer(whitelist_root=args.whitelist_root)
    if args.http:
        print(f"MCP server listening on http://{args.host}:{args.port}",
              file=sys.stderr)
        serve_http(server, args.host, args.port)
    else:
        serve_stdio(server, sys.stdin, sys.stdout)
    return EXIT_OK


def cmd_serve_gateway(args, out=None) -> int:
    if args.config:
        config = GatewayConfig.from_file(
            args.config, data_dir=args.data_dir, token=args.token,
            static_dir=args.static_dir,
        )
    else:
        config = GatewayConfig(
            data_dir=args.data_dir or "./feederkit-data",
            token=args.token or "dev-token",
            static_dir=args.static_dir,
        )
    app = GatewayApp(config)
    httpd = make_http_server(app, args.host, args.port)
    print(f"gateway listening on http://{args.host}:{args.port}", file=sys.stderr)
    httpd.serve_forever()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feederkit",
        description="Distribution-feeder power flow, QSTS, and tool server.",
    )
    parser.add_argument("--json", action="store_true",
                        help="emit raw tool envelopes as JSON")
    parser.add_argument("--strict", action="store_true",
                        help="nonzero exit on any failure envelope")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="snapshot power flow on a package")
    p.add_argument("package", help="library circuit name or package directory")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("qsts", help="run a quasi-static time series")
    p.add_argument("package")
    p.add_argument("--steps", type=int, default=24)
    p.add_argument("--step-hours", type=float, default=1.0)
    p.add_argument("--profile", default=None,
                   help="assign this profile to every load first")
    p.set_defaults(fn=cmd_qsts)

    p = sub.add_parser("skill", help="run a deterministic skill")
    p.add_argument("name", choices=["voltage_violation_analysis",
                                    "capacitor_placement",
                                    "overvoltage_mitigation"])
    p.add_argument("package")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=cmd_skill)

    p = sub.add_parser("chat", help="scripted conversation against a package")
    p.add_argument("--script", required=True, help="JSON transcript file")
    p.add_argument("--package", default="ieee13")
    p.add_argument("--text", default="run the scripted analysis")
    p.add_argument("--max-rounds", type=int, default=8)
    p.set_defaults(fn=cmd_chat)

    p = sub.add_parser("export", help="run QSTS and print CSV/JSON export")
    p.add_argument("package")
    p.add_argument("--steps", type=int, default=24)
    p.add_argument("--profile", default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("serve-mcp", help="run the MCP tool server")
    p.add_argument("--http", action="store_true", help="HTTP POST instead of stdio")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8710)
    p.add_argument("--whitelist-root", default=None)
    p.set_defaults(fn=cmd_serve_mcp)

    p = sub.add_parser("serve-gateway", help="run the REST gateway")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8720)
    p.add_argument("--data-dir", default=None)
    p.add_argument("--token", default=None)
    p.add_argument("--static-dir", default=None)
    p.add_argument("--config", default=None, help="JSON config file")
    p.set_defaults(fn=cmd_serve_gateway)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
