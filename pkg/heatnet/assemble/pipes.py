"""
Discretized pipe equations.

Momentum (implicit Euler in time) and thermal energy (implicit Euler or
central differences in space, implicit in time). Pipe endpoint pressures
are the node pressures. In a stationary context old and new layer coincide
and every time difference vanishes.
"""

from heatnet.assemble.context import AssemblyContext
from heatnet.network.graph import PipeArc
from heatnet.nlp.expr import Expr, smooth_abs
from heatnet.presolve.simplification import FrictionForm
from heatnet.schemas.enums import Scheme


def friction_term(ctx: AssemblyContext, pipe: PipeArc, v: Expr) -> Expr:
    coef = ctx.friction[pipe.id] * ctx.fluid.density / (2.0 * pipe.diameter)
    form = ctx.plan[pipe.id].friction
    if form is FrictionForm.POSITIVE:
        return coef * (v * v)
    if form is FrictionForm.NEGATIVE:
        return -coef * (v * v)
    return coef * (smooth_abs(v) * v)


def momentum_residual(ctx: AssemblyContext, pipe: PipeArc, i: int) -> Expr:
    """ρ(v⁺ - v)/Δt + (p_head - p_tail)/L + gρh' + λρ|v⁺|v⁺/(2D), Pa/m"""
    old, new = ctx.step_layers(i)
    rho = ctx.fluid.density
    v_new = ctx.value(("v", pipe.id), new)
    dp = ctx.value(("p", pipe.head), new) - ctx.value(("p", pipe.tail), new)
    residual = dp / pipe.length + ctx.fluid.gravity * rho * pipe.slope + friction_term(ctx, pipe, v_new)
    if old != new:
        residual = rho * (v_new - ctx.value(("v", pipe.id), old)) / ctx.dt + residual
    return residual


def _loss_coefficient(ctx: AssemblyContext, pipe: PipeArc) -> float:
    return 4.0 * pipe.heat_transfer / (ctx.fluid.heat_capacity * ctx.fluid.density * pipe.diameter)


def _theta(ctx: AssemblyContext, pipe: PipeArc, k: int, layer: int) -> Expr:
    return ctx.value(("theta_pipe", pipe.id, k), layer)


def energy_residual_implicit(ctx: AssemblyContext, pipe: PipeArc, k: int, i: int) -> Expr:
    """Backward difference between grid points k and k+1, K/s"""
    cells = ctx.disc.cells_of(pipe)
    if not 0 <= k < cells:
        raise ValueError(f"cell index {k} outside [0, {cells - 1}] for pipe {pipe.id}")
    old, new = ctx.step_layers(i)
    v = ctx.value(("v", pipe.id), new)
    upper = _theta(ctx, pipe, k + 1, new)
    residual = (
        v * (upper - _theta(ctx, pipe, k, new)) / ctx.disc.dx(pipe)
        + _loss_coefficient(ctx, pipe) * (upper - ctx.fluid.ambient_temp)
    )
    if old != new:
        residual = (upper - _theta(ctx, pipe, k + 1, old)) / ctx.dt + residual
    return residual


def energy_residual_central(ctx: AssemblyContext, pipe: PipeArc, k: int, i: int) -> Expr:
    """
    Central stencil at interior points k = 1..M-1; k = M is the one-sided
    closing equation at the pipe end. k = 0 carries no equation, the inlet
    temperature comes from the node coupling.
    """
    cells = ctx.disc.cells_of(pipe)
    if k == cells:
        return energy_residual_implicit(ctx, pipe, cells - 1, i)
    if not 1 <= k < cells:
        raise ValueError(f"no central equation at grid point {k} of pipe {pipe.id}")
    old, new = ctx.step_layers(i)
    v = ctx.value(("v", pipe.id), new)
    centre = _theta(ctx, pipe, k, new)
    residual = (
        v * (_theta(ctx, pipe, k + 1, new) - _theta(ctx, pipe, k - 1, new)) / (2.0 * ctx.disc.dx(pipe))
        + _loss_coefficient(ctx, pipe) * (centre - ctx.fluid.ambient_temp)
    )
    if old != new:
        residual = (centre - _theta(ctx, pipe, k, old)) / ctx.dt + residual
    return residual


def energy_points(ctx: AssemblyContext, pipe: PipeArc):
    """Grid indices that carry an energy equation under the active scheme"""
    cells = ctx.disc.cells_of(pipe)
    if ctx.disc.scheme is Scheme.IMPLICIT:
        return range(cells)
    return range(1, cells + 1)


def energy_residual(ctx: AssemblyContext, pipe: PipeArc, k: int, i: int) -> Expr:
    if ctx.disc.scheme is Scheme.IMPLICIT:
        return energy_residual_implicit(ctx, pipe, k, i)
    return energy_residual_central(ctx, pipe, k, i)
