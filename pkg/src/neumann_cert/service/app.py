"""HTTP service exposing the certification toolkit.

Thin orchestration over the core package: every endpoint validates its
payload with the schema models, calls one library routine, and returns the
canonical JSON shape.  Domain violations surface as 422 responses.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse

from .. import __version__, certify, constants, constructions, ode, oracles, suites
from ..errors import DomainError, NeumannCertError
from ..potential import Potential
from . import schemas

app = FastAPI(
    title="neumann-cert",
    version=__version__,
    description="Certification service for nonresonance of the Neumann "
                "problem u'' + a(x) u = 0, u'(0) = u'(L) = 0.",
)


@app.exception_handler(NeumannCertError)
async def _toolkit_error(request: Request, exc: NeumannCertError) -> JSONResponse:
    # invalid inputs (domain/representation/precondition violations) are the
    # caller's problem; integrator or construction breakdowns are ours
    status = 422 if isinstance(exc, ValueError) else 500
    return JSONResponse(status_code=status, content={"detail": str(exc)})


@app.get("/health", response_model=schemas.HealthResponse)
def health() -> schemas.HealthResponse:
    return schemas.HealthResponse(status="ok", version=__version__)


@app.get("/constants", response_model=schemas.ConstantsResponse)
def get_constants(n: int = Query(default=1, ge=1),
                  L: float = Query(default=1.0, gt=0.0)) -> schemas.ConstantsResponse:
    return schemas.ConstantsResponse(
        n=n, L=L,
        lambda_n=constants.lambda_n(n, L),
        lambda_next=constants.lambda_n(n + 1, L),
        mu_n=constants.mu_n(n, L),
        beta1=constants.beta1(n, L),
        beta_inf=constants.beta_inf(n, L),
    )


def _greedy_with_eps(a: Potential, n: int, eps: float | None) -> certify.Certificate:
    part = certify.greedy_partition(a, n, eps)
    if part is None:
        return certify.Certificate(
            certify.INCONCLUSIVE, certify.METHOD_GREEDY, n, None,
            {"greedy_found": -1.0}, {"tau_ae": certify.TAU_AE})
    cert = certify.check_l1_partition(a, part)
    return certify.Certificate(cert.verdict, certify.METHOD_GREEDY, n,
                               cert.partition, cert.margins, cert.tolerances,
                               cert.assumptions)


@app.post("/certify", response_model=schemas.CertificateModel)
def post_certify(req: schemas.CertifyRequest) -> schemas.CertificateModel:
    a = req.potential.to_potential()
    method = req.method
    if method == "auto":
        if req.n < 1:
            raise DomainError("automatic certification needs a level n >= 1")
        cert = certify.certify_auto(a, req.n)
    elif method == "classical":
        cert = certify.check_classical_first(a)
    elif method == "dolph":
        if req.n < 1:
            raise DomainError("the spectral-gap criterion needs a level n >= 1")
        cert = certify.check_dolph(a, req.n)
    elif method == "l1":
        if req.n < 1:
            raise DomainError("the global L1 criterion needs a level n >= 1")
        cert = certify.check_l1_global(a, req.n)
    elif method == "greedy":
        if req.n < 1:
            raise DomainError("the greedy partition search needs a level n >= 1")
        cert = _greedy_with_eps(a, req.n, req.eps)
    else:
        if req.partition is None:
            raise DomainError(f"method {method!r} requires a partition")
        part = req.partition.to_partition()
        if method == "linf-partition":
            cert = certify.check_linf_partition(a, part)
        else:
            cert = certify.check_l1_partition(a, part)
    return schemas.CertificateModel(**cert.to_json_dict())


@app.post("/spectrum", response_model=schemas.SpectrumResponse)
def post_spectrum(req: schemas.SpectrumRequest) -> schemas.SpectrumResponse:
    a = req.potential.to_potential()
    bc_map = {"neumann": oracles.FD_NEUMANN, "mixed_dn": oracles.FD_MIXED_DN,
              "mixed_nd": oracles.FD_MIXED_ND}
    sigma = oracles.fd_spectrum(a, req.fd_grid, bc_map[req.bc])
    near = sigma[np.argsort(np.abs(sigma))[:5]]
    trajectory = None
    if req.bc == "neumann":
        traj = ode.neumann_shot(a)
        residual = traj.end_residual
        if req.include_trajectory:
            trajectory = [schemas.TrajectoryPoint(**r) for r in traj.to_json_records()]
    else:
        residual = ode.disfocal_residual(a, None, req.bc)
    return schemas.SpectrumResponse(
        residual=float(residual),
        indicator=float(np.min(np.abs(sigma))),
        resonant=bool(abs(residual) <= ode.RESIDUAL_TOL),
        eigenvalues_near_zero=[float(s) for s in np.sort(near)],
        trajectory=trajectory,
    )


@app.post("/construct", response_model=schemas.ConstructResponse)
def post_construct(req: schemas.ConstructRequest) -> schemas.ConstructResponse:
    if req.family == "minimizing":
        if req.eps is None:
            raise DomainError("the minimizing family needs eps > 0")
        a, sol = constructions.minimizing_sequence(req.n, req.L, req.eps)
        lam = constants.lambda_n(req.n, req.L)
        diags = {
            "neumann_residual": ode.neumann_residual(a),
            "max_ode_defect": constructions.max_ode_defect(a, sol),
            "l1_excess": a.l1_excess(lam),
            "optimal_constant": constants.beta1(req.n, req.L),
        }
        return schemas.ConstructResponse(
            potential=schemas.PotentialModel.from_potential(a),
            solution=schemas.SolutionModel(**sol.to_json_dict()),
            diagnostics=diags)

    if req.family == "step":
        if req.partition is None:
            raise DomainError("the step family needs a partition")
        part = req.partition.to_partition()
        a, sol = constructions.resonant_step(part)
        diags = {
            "neumann_residual": ode.neumann_residual(a),
            "joint_defect": sol.joint_defect(),
        }
        return schemas.ConstructResponse(
            potential=schemas.PotentialModel.from_potential(a),
            solution=schemas.SolutionModel(**sol.to_json_dict()),
            diagnostics=diags)

    if req.family == "constant":
        if req.q is None:
            raise DomainError("the constant family needs a half-wave count q")
        a, sol = constructions.constant_resonant(req.q, req.L)
        diags = {
            "neumann_residual": ode.neumann_residual(a),
            "joint_defect": sol.joint_defect(),
        }
        return schemas.ConstructResponse(
            potential=schemas.PotentialModel.from_potential(a),
            solution=schemas.SolutionModel(**sol.to_json_dict()),
            diagnostics=diags)

    # counterexample
    if req.partition is None:
        raise DomainError("the counterexample family needs a partition")
    part = req.partition.to_partition()
    eps = req.eps if req.eps is not None else 1e-3
    a = constructions.l1_counterexample(part, eps)
    lam = constants.lambda_n(part.n, a.L)
    diags = {
        "l1_excess": a.l1_excess(lam),
        "optimal_constant": constants.beta1(part.n, a.L),
        "per_interval_certified": 1.0,
    }
    return schemas.ConstructResponse(
        potential=schemas.PotentialModel.from_potential(a),
        solution=None, diagnostics=diags)


@app.post("/verify", response_model=schemas.SuiteReportModel)
def post_verify(req: schemas.VerifyRequest) -> schemas.SuiteReportModel:
    report = suites.run_suite(req.suite, req.seed)
    return schemas.SuiteReportModel(**report.to_json_dict())
