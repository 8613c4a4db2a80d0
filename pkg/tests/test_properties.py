import json
import math

from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from ugc_platforms.allocation import IterationTrace, gamma_map, iterate_to_fixed_point
from ugc_platforms.equilibrium import EquilibriumSet, cutoff_roots, solve_equilibria
from ugc_platforms.game import GameSolution, nash_solve, profits
from ugc_platforms.model import AdProfile, ModelParams

from oracles import brute_force_share, piecewise_profits, second_difference

PROPS = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])

lams = st.floats(0.005, 0.245)
ad = st.floats(0.0, 0.3)
shares = st.floats(0.0, 1.0)


@PROPS
@given(st.floats(1e-6, 0.125 - 1e-6))
def test_vieta(c):
    lo, hi = cutoff_roots(c)
    assert lo < hi
    assert math.isclose(lo + hi, 0.5, abs_tol=1e-15)
    assert math.isclose(lo * hi, c / 2, rel_tol=1e-12, abs_tol=1e-18)


@PROPS
@given(lams, ad, ad)
def test_gamma_absorbs_boundaries(lam, a1, a2):
    p, ads = ModelParams(lam), AdProfile(a1, a2)
    assert gamma_map(p, ads, 0.0) == 0.0
    assert gamma_map(p, ads, 1.0) == 1.0


@PROPS
@given(lams, st.floats(0.0, 0.2), st.floats(0.0, 0.2), shares)
def test_gamma_matches_brute_force(lam, a1, a2, n):
    assume(abs(n - 0.5) > 1e-6)
    share, _, _ = brute_force_share(lam, a1, a2, n)
    # One type in a thousand of quantization.
    assert abs(share - gamma_map(ModelParams(lam), AdProfile(a1, a2), n)) <= 2e-3


@PROPS
@given(lams, st.floats(0.0, 0.2), st.floats(0.0, 1.0))
def test_platform1_concave_in_interior(lam, a2, frac):
    lo, hi = -lam / 2, 0.125 - lam / 2
    a1 = a2 + lo + (hi - lo) * (0.01 + 0.98 * frac)
    assume(a1 > 1e-3)
    s = math.sqrt(1 - 8 * (a1 - a2 + lam / 2))
    h = min(1e-5, 1e-3 * s * s)
    fd = second_difference(lambda x: float(piecewise_profits(lam, x, a2)[0]), a1, h=h)
    assert fd < 0


@PROPS
@given(lams)
def test_platform2_convex_at_foc(lam):
    from ugc_platforms.game import interior_foc_candidate

    cand = interior_foc_candidate(ModelParams(lam)).ads
    s = math.sqrt(1 - 8 * (cand.a1 - cand.a2 + lam / 2))
    h = min(1e-5, 1e-3 * s * s)
    fd = second_difference(lambda x: float(piecewise_profits(lam, cand.a1, x)[1]), cand.a2, h=h)
    assert fd > 0


@PROPS
@given(lams, ad, ad, st.sampled_from([1, 2]))
def test_equilibrium_set_roundtrip(lam, a1, a2, focal):
    result = solve_equilibria(ModelParams(lam), AdProfile(a1, a2), focal)
    again = EquilibriumSet.from_dict(json.loads(json.dumps(result.to_dict())))
    assert again == result and again.params == result.params and again.ads == result.ads


@PROPS
@given(lams, ad, ad, shares)
def test_trace_roundtrip(lam, a1, a2, start):
    assume(abs(start - 0.5) > 1e-3)
    p, ads = ModelParams(lam), AdProfile(a1, a2)
    try:
        trace = iterate_to_fixed_point(p, ads, start, max_steps=200)
    except ValueError:
        assume(False)
    assert IterationTrace.from_dict(json.loads(json.dumps(trace.to_dict(p, ads)))) == trace


@PROPS
@given(lams, ad, ad)
def test_params_and_profits_roundtrip(lam, a1, a2):
    p, ads = ModelParams(lam), AdProfile(a1, a2)
    assert ModelParams.from_dict(json.loads(json.dumps(p.to_dict()))) == p
    assert AdProfile.from_dict(json.loads(json.dumps(ads.to_dict()))) == ads
    out = profits(p, ads)
    assert type(out).from_dict(json.loads(json.dumps(out.to_dict()))) == out


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 0.24))
def test_game_solution_roundtrip(lam):
    sol = nash_solve(ModelParams(lam), grid_step=None, strict=False)
    assert GameSolution.from_dict(json.loads(json.dumps(sol.to_dict()))) == sol
