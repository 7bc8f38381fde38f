"""Deterministic API server for the browser tests.

Runs the real FastAPI app over the offline pipeline environment from the
package test suite. Transcript entries are synthesized from each run's
current (possibly user-edited) query bundle right before the pipeline
starts, so a fetch can only succeed against the bundle the UI saved.
"""

import os
import sys
import tempfile

HERE = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, os.path.join(HERE, "..", "..", "tests"))

import uvicorn

from greylit.service.api import create_app
from service_env import build_service, transcript_for


def main():
    port = int(sys.argv[1]) if len(sys.argv) > 1 else 8711
    data_dir = tempfile.mkdtemp(prefix="greylit-fixture-")
    service, _options, transport = build_service(data_dir)

    run_pipeline = service.run_pipeline

    def run_with_transcript(run_id):
        entries = transcript_for(service, run_id)
        transport.entries.extend(entries)
        transport.consumed.extend([False] * len(entries))
        return run_pipeline(run_id)

    service.run_pipeline = run_with_transcript
    app = create_app(service, background=False)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


if __name__ == "__main__":
    main()
