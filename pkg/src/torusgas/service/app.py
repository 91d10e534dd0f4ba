"""FastAPI application exposing the evaluator and its oracle suite."""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..cycles import unity_check
from ..errors import (ConfigurationError, ConsistencyError, RangeError,
                      TorusGasError)
from ..graphs import (CouplingGraph, constraint_rank, is_valid_merger,
                      nonzero_integer_solution, nullspace_basis)
from ..oracles import (DiscretePolicy, discrete_G2, exact_Q2, ideal_gas_Q,
                       matrix_A_check, IDEAL_GAS_MAX_N)
from ..cycles import CycleStructure
from ..series import evaluate_G, evaluate_Q
from ..thermal import theta_sum, theta_truncation_radius
from . import schemas


def create_app() -> FastAPI:
    app = FastAPI(title="torusgas",
                  description="Canonical partition functions of quantum gases "
                              "on a torus, with verification oracles.")

    @app.exception_handler(ConsistencyError)
    async def _consistency(request: Request, exc: ConsistencyError):
        return JSONResponse(status_code=500,
                            content={"detail": str(exc), "kind": "consistency"})

    @app.exception_handler(TorusGasError)
    async def _domain(request: Request, exc: TorusGasError):
        kind = "config" if isinstance(exc, ConfigurationError) else "domain"
        if isinstance(exc, RangeError):
            kind = "range"
        return JSONResponse(status_code=400,
                            content={"detail": str(exc), "kind": kind})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate(req: schemas.EvaluateRequest):
        params = req.system.to_params()
        pot = req.potential.to_potential(params.d, params.L)
        policy = req.policy.to_policy()
        result = evaluate_Q(params, pot, policy, threads=req.threads)
        check = None
        if req.potential.is_zero() and params.N <= IDEAL_GAS_MAX_N:
            oracle = ideal_gas_Q(params, theta_tol=policy.theta_tol)
            scale = max(abs(result.Q), abs(oracle))
            rel = abs(result.Q - oracle) / scale if scale else 0.0
            check = schemas.IdealGasCheck(oracle_q=oracle, rel_diff=rel,
                                          passed=rel <= 1e-12)
        log_q = math.log(result.Q) if result.Q > 0 else None
        return schemas.EvaluateResponse(
            q=result.Q,
            log_q=log_q,
            free_energy=None if log_q is None else -log_q / params.beta,
            breakdown=[schemas.BreakdownRow(p=p, alpha=a, value=v)
                       for (p, a), v in sorted(result.breakdown.items())],
            term_count=result.term_count,
            skipped_invalid_alpha=result.skipped_invalid_alpha,
            tail_bound=result.tail_bound_estimate,
            ideal_gas_check=check,
        )

    @app.post("/oracle/ideal-gas", response_model=schemas.OracleIdealGasResponse)
    def oracle_ideal_gas(req: schemas.OracleIdealGasRequest):
        params = req.system.to_params()
        from ..potential import ZeroPotential
        from ..series import TruncationPolicy
        oracle = ideal_gas_Q(params)
        series = evaluate_Q(params, ZeroPotential(d=params.d),
                            TruncationPolicy(alpha_max=0)).Q
        scale = max(abs(series), abs(oracle))
        rel = abs(series - oracle) / scale if scale else 0.0
        return schemas.OracleIdealGasResponse(oracle_q=oracle, series_q=series,
                                              rel_diff=rel, tol=req.tol,
                                              passed=rel <= req.tol)

    @app.post("/oracle/discrete2", response_model=schemas.OracleDiscrete2Response)
    def oracle_discrete2(req: schemas.OracleDiscrete2Request):
        params = req.system.to_params()
        pot = req.potential.to_potential(params.d, params.L)
        policy = req.policy.to_policy()
        lengths = tuple(req.discrete.partition)
        cont = evaluate_G(CycleStructure(lengths), params, pot, policy)
        rows = []
        for m in req.discrete.m_list:
            disc = discrete_G2(lengths, params, pot,
                               DiscretePolicy(m=m, z_cutoff=req.discrete.z_cutoff,
                                              alpha_max=req.discrete.alpha_max))
            rows.append(schemas.Discrete2Row(m=m, discrete=disc, continuous=cont,
                                             abs_diff=abs(disc - cont)))
        diffs = [r.abs_diff for r in rows]
        shrinking = all(b < a for a, b in zip(diffs, diffs[1:]))
        if len(rows) >= 2:
            increment = abs(rows[-1].discrete - rows[-2].discrete)
            final_ok = diffs[-1] <= req.tol * increment
        else:
            final_ok = True
        return schemas.OracleDiscrete2Response(rows=rows,
                                               differences_shrink=shrinking,
                                               final_within_allowance=final_ok,
                                               passed=shrinking and final_ok)

    @app.post("/oracle/exactdiag", response_model=schemas.OracleExactDiagResponse)
    def oracle_exactdiag(req: schemas.OracleExactDiagRequest):
        params = req.system.to_params()
        pot = req.potential.to_potential(params.d, params.L)
        policy = req.policy.to_policy()
        result = evaluate_Q(params, pot, policy)
        exact = exact_Q2(params, pot, req.momentum_cutoff)
        smaller = exact_Q2(params, pot, max(1, req.momentum_cutoff - 2))
        rel = abs(result.Q - exact) / abs(exact) if exact else abs(result.Q)
        tolerance = max(req.tol, result.tail_bound_estimate / abs(exact)) if exact \
            else req.tol
        return schemas.OracleExactDiagResponse(
            exact_q2=exact, series_q=result.Q, rel_diff=rel,
            tail_bound=result.tail_bound_estimate, tolerance_used=tolerance,
            cutoff_cauchy_diff=abs(exact - smaller), passed=rel <= tolerance)

    @app.post("/oracle/matrix-a", response_model=schemas.OracleMatrixAResponse)
    def oracle_matrix_a(req: schemas.OracleMatrixARequest):
        rep = matrix_A_check(req.m)
        return schemas.OracleMatrixAResponse(
            m=rep.m, inverse_identity_exact=rep.inverse_identity_exact,
            eigenpairs_ok=rep.eigenpairs_ok,
            max_eigen_residual=rep.max_eigen_residual,
            degeneracy_ok=rep.degeneracy_ok, passed=rep.passed)

    @app.post("/graph/validate", response_model=schemas.GraphValidateResponse)
    def graph_validate(req: schemas.GraphValidateRequest):
        p = max(max(a, b) for a, b in req.edges)
        g = CouplingGraph(p, [(a, b, None) for a, b in req.edges])
        valid = is_valid_merger(g)
        K, m = constraint_rank(g)
        n_i = nullspace_basis(g).dimension
        solution = None
        if valid:
            sol = nonzero_integer_solution(g, 1)
            solution = [list(sol[e]) for e in range(g.E)]
        return schemas.GraphValidateResponse(valid=valid, vertices=g.p,
                                             edge_count=g.E, k=K, m=m, n_i=n_i,
                                             solution=solution)

    @app.post("/unity-check", response_model=schemas.UnityCheckResponse)
    def unity(req: schemas.UnityCheckRequest):
        part, comp = unity_check(req.n)
        return schemas.UnityCheckResponse(n=req.n, partition_sum=str(part),
                                          composition_sum=str(comp),
                                          exact=(part == 1 and comp == 1))

    @app.post("/theta", response_model=schemas.ThetaResponse)
    def theta(req: schemas.ThetaRequest):
        shift = tuple(req.shift) if req.shift is not None else 0.0
        value = theta_sum(req.c, shift, req.d, tol=req.tol)
        return schemas.ThetaResponse(value=value,
                                     truncation_radius=theta_truncation_radius(req.c, req.tol))

    return app


app = create_app()
