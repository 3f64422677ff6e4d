"""FastMCP server for the incidence laboratory."""

import logging

from fastmcp import FastMCP

from incidence_lab.config import settings
from incidence_lab.services.laboratory import Laboratory
from incidence_lab.tools.lab_tools import register_tools

# Configure logging
logging.basicConfig(
    level=settings.log_level,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)

# Initialize FastMCP server
mcp = FastMCP("incidence-lab")

lab = Laboratory(output_dir=settings.output_dir)

register_tools(mcp, lab)

logger.info(f"Incidence lab MCP server initialized (seed {settings.seed}, "
            f"degree cap {settings.degree_cap})")


def main() -> None:
    mcp.run()


if __name__ == "__main__":
    main()
