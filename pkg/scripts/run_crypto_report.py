"""Print every closed-form cryptanalysis quantity in one report."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from vqlab import cryptattack as ca


def main():
    may = ca.mayers_attack()
    print("2-state coin-flip attack (ideal fixed-overlap cloner):")
    print(f"  F_L = {may.inputs['F_L']:.5f}")
    print(f"  P_guess = {may.p_guess:.5f}  P_fail = {1 - may.p_guess:.5f}")
    print(f"  P_success = {may.p_success:.5f}  bias = {may.bias:.5f}")
    print(f"  majority vote: n=3 -> {ca.mayers_guess_n(1 - may.p_guess, 3):.4f}, "
          f"n=51 -> {ca.mayers_guess_n(1 - may.p_guess, 51):.6f}")
    a1 = ca.aharonov_attack1()
    print(f"4-state attack I:  P = {a1.p_success:.4f}  bias = {a1.bias:.4f}")
    a2 = ca.aharonov_attack2_exact()
    print(f"4-state attack II: P = {a2.p_success:.4f}  bias = {a2.bias:.4f}")
    lo, hi = ca.aharonov_attack2_bounds(0.989, 1 / np.sqrt(2))
    print(f"  2-state bounds at F_L=0.989: [{lo:.4f}, {hi:.4f}]")
    qkd = ca.qkd_critical_error()
    print(f"BB84: chi_min = {qkd.chi_min:.5f}  "
          f"D_crit = {100 * qkd.d_crit:.2f}%  residual = {qkd.residual:.1e}")


if __name__ == "__main__":
    main()
