#!/usr/bin/env python3
"""Start the virtual-laboratory HTTP service.

Respects CELLULAT_ADDR (host:port) and CELLULAT_MODEL_DIR; with no model
directory configured the bundled scenarios are preloaded.
"""

import os

import uvicorn

from cellulat.scenarios import ca2plus_scenario, toy_linear_chain
from cellulat.service import create_app


def main() -> None:
    addr = os.environ.get("CELLULAT_ADDR", "127.0.0.1:8077")
    host, _, port = addr.rpartition(":")
    app = create_app(model_dir=os.environ.get("CELLULAT_MODEL_DIR"))
    if not app.state.lab.models:
        for scenario in (ca2plus_scenario(), toy_linear_chain(8)):
            record, _ = app.state.lab.add_model(scenario.text)
            print(f"preloaded {record.id}")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
