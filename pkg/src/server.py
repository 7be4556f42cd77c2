"""WL CDMA Games MCP Server - Exposes the game solvers and predictors as MCP tools."""

import asyncio
import json
import logging
import sys
from typing import Any, Optional

from dotenv import load_dotenv
from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import TextContent, Tool

from .code_game import IterationSchedule, run_to_fixed_point, sum_capacity_comparison
from .lsa import LsaInput, lsa_power_improved, lsa_power_plain
from .power_game import GameSchedule, GameVariant, UtilityConfig, run_ee_game, solve_target_sinr
from .settings import Settings, get_settings
from .signal_model import ScenarioConfig, derive_seed, generate_codes, generate_scenario

# Load environment variables
load_dotenv()

# Initialize MCP server
server = Server("wl-cdma-games")

_SCENARIO_PROPERTIES = {
    "K": {"type": "integer", "description": "Number of users", "minimum": 1},
    "N": {"type": "integer", "description": "Processing gain", "minimum": 1},
    "seed": {"type": "integer", "description": "Scenario seed (default: 0)", "minimum": 0},
    "noise_psd": {"type": "number", "description": "Noise level N0 in W/Hz (default: 2.5e-10)"},
    "p_max": {"type": "number", "description": "Maximum transmit power in W (default: 1)"},
    "path_loss_exponent": {"type": "number", "description": "Channel variance exponent (default: 1.5)"},
}


def _scenario(arguments: dict):
    fields = {key: arguments[key] for key in ("K", "N", "noise_psd", "p_max", "path_loss_exponent") if key in arguments}
    seed = int(arguments.get("seed", 0))
    return generate_scenario(ScenarioConfig(**fields), derive_seed(seed, 0)), seed


@server.list_tools()
async def list_tools() -> list[Tool]:
    """List all available solver tools."""
    return [
        Tool(
            name="solve_target_sinr",
            description="Solve for the utility-maximizing target SINR for packet length M",
            inputSchema={
                "type": "object",
                "properties": {
                    "M": {"type": "integer", "description": "Packet length in symbols (>= 2)", "minimum": 2}
                },
                "required": ["M"]
            }
        ),
        Tool(
            name="run_code_game",
            description="Run the spreading-code/receiver iteration on a random scenario and report its fixed point",
            inputSchema={
                "type": "object",
                "properties": {
                    **_SCENARIO_PROPERTIES,
                    "variant": {"type": "string", "enum": ["wl", "linear"], "description": "Receiver family (default: wl)"},
                    "max_sweeps": {"type": "integer", "description": "Sweep limit (default: 5000)", "minimum": 1},
                },
                "required": ["K", "N"]
            }
        ),
        Tool(
            name="run_energy_efficiency_game",
            description="Play one energy-efficiency game variant on a random scenario",
            inputSchema={
                "type": "object",
                "properties": {
                    **_SCENARIO_PROPERTIES,
                    "variant": {"type": "string", "enum": [v.value for v in GameVariant]},
                    "M": {"type": "integer", "description": "Packet length (default: 120)", "minimum": 2},
                },
                "required": ["K", "N", "variant"]
            }
        ),
        Tool(
            name="predict_lsa_powers",
            description="Predict powers and utilities with the plain and improved large-system predictors",
            inputSchema={
                "type": "object",
                "properties": {
                    **_SCENARIO_PROPERTIES,
                    "detection": {"type": "string", "enum": ["wl", "linear"], "description": "Detector (default: wl)"},
                    "M": {"type": "integer", "description": "Packet length (default: 120)", "minimum": 2},
                },
                "required": ["K", "N"]
            }
        ),
        Tool(
            name="compare_sum_capacity",
            description="Optimal sum capacity of the WL system versus its complex and real counterparts",
            inputSchema={
                "type": "object",
                "properties": _SCENARIO_PROPERTIES,
                "required": ["K", "N"]
            }
        ),
    ]


@server.call_tool()
async def call_tool(name: str, arguments: Any) -> list[TextContent]:
    """Handle tool calls."""
    arguments = arguments or {}
    try:
        if name == "solve_target_sinr":
            target = solve_target_sinr(int(arguments["M"]))
            text = (
                f"✓ Target SINR for M={target.M}: {target.gamma_bar:.6f} "
                f"({target.gamma_bar_db:.3f} dB), residual {target.residual:.2e}"
            )
            return [TextContent(type="text", text=text)]

        elif name == "run_code_game":
            scenario, seed = _scenario(arguments)
            codes = generate_codes(scenario.N, scenario.K, "binary", seed=derive_seed(seed, 1))
            schedule = IterationSchedule(max_sweeps=int(arguments.get("max_sweeps", 5000)))
            report = await asyncio.to_thread(
                run_to_fixed_point, scenario, codes, schedule, arguments.get("variant", "wl")
            )
            status = "converged" if report.converged else "did not converge"
            result = f"🔁 {report.variant.upper()} code iteration {status} after {report.sweeps_used} sweeps\n\n"
            result += f"WL-TWSC: {report.wl_twsc:.6g}\n"
            result += f"TWSC: {report.twsc:.6g}\n"
            result += f"Sum capacity: {report.c_sum:.6g} nats\n"
            result += f"Total MSE: {report.tmmse:.6g}\n"
            result += f"Eigenvalue groups: {len(report.partition)}\n"
            return [TextContent(type="text", text=result)]

        elif name == "run_energy_efficiency_game":
            scenario, seed = _scenario(arguments)
            codes = generate_codes(scenario.N, scenario.K, "binary", seed=derive_seed(seed, 1))
            config = UtilityConfig(M=int(arguments.get("M", 120)))
            outcome = await asyncio.to_thread(
                run_ee_game, scenario, codes, GameVariant(arguments["variant"]), config, GameSchedule()
            )
            result = f"⚡ {outcome.variant.value} game ({'converged' if outcome.converged else 'not converged'}, "
            result += f"{outcome.iterations} rounds), target SINR {outcome.gamma_bar:.4f}\n\n"
            for k, user in enumerate(outcome.users):
                flag = " [max power]" if user.at_max_power else ""
                result += (
                    f"{k}. p={user.power:.4e} W, SINR={user.sinr_db:.2f} dB, "
                    f"u={user.utility:.4e} bit/J{flag}\n"
                )
            return [TextContent(type="text", text=result)]

        elif name == "predict_lsa_powers":
            scenario, _ = _scenario(arguments)
            config = UtilityConfig(M=int(arguments.get("M", 120)))
            gamma_bar = solve_target_sinr(config.M).gamma_bar
            inp = LsaInput.from_scenario(scenario, gamma_bar, arguments.get("detection", "wl"), config)
            plain = lsa_power_plain(inp)
            improved = lsa_power_improved(inp)
            payload = {
                "gamma_bar": gamma_bar,
                "load": inp.load,
                "plain": plain.model_dump(),
                "improved": improved.model_dump(),
            }
            return [TextContent(type="text", text=json.dumps(payload, indent=2))]

        elif name == "compare_sum_capacity":
            scenario, _ = _scenario(arguments)
            comparison = sum_capacity_comparison(scenario)
            text = (
                f"Sum capacity (nats): WL={comparison.wl:.6g}, complex={comparison.complex:.6g}, "
                f"real={comparison.real:.6g} (WL/real = {comparison.wl / comparison.real:.6f})"
            )
            return [TextContent(type="text", text=text)]

        else:
            return [TextContent(type="text", text=f"Unknown tool: {name}")]

    except Exception as e:
        return [TextContent(type="text", text=f"❌ Error: {str(e)}")]


def configure_logging(settings: Optional[Settings] = None) -> logging.Logger:
    """Send the package loggers to stderr at the configured level; stdout carries the protocol."""
    settings = settings or get_settings()
    package_logger = logging.getLogger(__package__ or "src")
    package_logger.setLevel(getattr(logging, settings.log_level, logging.INFO))
    if not package_logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        package_logger.addHandler(handler)
    return package_logger


async def main():
    """Main entry point for the MCP server."""
    configure_logging()
    print("🚀 Starting WL CDMA Games MCP Server...", file=sys.stderr, flush=True)
    async with stdio_server() as (read_stream, write_stream):
        await server.run(
            read_stream,
            write_stream,
            server.create_initialization_options()
        )


if __name__ == "__main__":
    asyncio.run(main())
