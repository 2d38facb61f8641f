"""Fit decay rates of single-mode perturbations against the linearized
spectrum.

A radius field 1 + eps Y_l0 relaxes like exp(rate * t) with
rate = -(l+2)(l+1)^2 l^2 (l-1); the translation mode l = 1 sits in the
kernel and should fit to nearly zero.
"""

import numpy as np

from triheat import diagnostics, flow, shapes


def fitted_mode_rate(l, eps=1e-3, t_end=0.05, dt=2e-4):
    state = shapes.generate(
        "perturbed", "spectral", bandlimit=16, perturb=f"{l},0,{eps}"
    )
    traj = flow.run(state, t_end, dt=dt, cadence=5)
    lmax = state.grid.bandlimit
    series = np.array([e.state.coeffs[l, lmax] for e in traj.entries])
    rate, _ = diagnostics.fit_exponential(traj.times(), series)
    return rate


def main():
    print(f"{'l':>3} {'predicted':>12} {'fitted':>12} {'rel err':>9}")
    for l, t_end, dt in [(1, 0.01, 2e-4), (2, 0.05, 2e-4), (3, 0.005, 2e-5)]:
        predicted = diagnostics.linearized_rate(l, 1.0)
        fitted = fitted_mode_rate(l, t_end=t_end, dt=dt)
        if predicted == 0.0:
            note = f"|fitted| = {abs(fitted):.2e}"
            print(f"{l:>3} {predicted:>12.1f} {fitted:>12.2e} {note:>9}")
        else:
            rel = abs(fitted / predicted - 1.0)
            print(f"{l:>3} {predicted:>12.1f} {fitted:>12.2f} {rel:>9.2%}")


if __name__ == "__main__":
    main()
