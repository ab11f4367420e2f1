"""Entity-to-feature projections for rank requests.

Both the HTTP service and the simulation driver build rank requests
through these functions, so the online model, batch training, and
offline replay all see identical featurization. Identifier keys are
carried for response bookkeeping but are always excluded from learning.

The maps stay deliberately compact: with all-1.0 hashed features the
SGD step size scales with the active-feature count, and a compact map
keeps ``learning_rate * nnz`` inside the stable region.
"""

from __future__ import annotations

from bidimatch.domain import Job, Traveler

NOT_GIVEN = "none"


def job_features(job: Job) -> dict[str, object]:
    return {
        "job_id": job.job_id,
        "skill": job.required_skill,
        "state": job.state,
        "shift": job.shift_name,
        "start": job.start_date.isoformat() if job.start_date else NOT_GIVEN,
    }


def traveler_features(traveler: Traveler) -> dict[str, object]:
    desired = "+".join(sorted(traveler.desired_states)) if traveler.desired_states else NOT_GIVEN
    return {
        "contact_id": traveler.contact_id,
        "skill": traveler.primary_skill,
        "desired_state": desired,
        "shift_pref": traveler.desired_shift_name or NOT_GIVEN,
        "status": traveler.traveler_status.value,
        "avail": traveler.availability_date.isoformat() if traveler.availability_date else NOT_GIVEN,
    }
