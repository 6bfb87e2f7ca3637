"""Fit the subgroup inequality for the coordinate plane Z^2 inside Z^3."""

from fillvol.builtins import chain_map, complex_spec
from fillvol.complexes import instantiate_map, instantiate_window
from fillvol.functions import fv_table, subgroup_inequality_check


def main(k_max=8):
    h, g = complex_spec("z2-torus"), complex_spec("z3-cubes")
    wh = instantiate_window(h, 4)
    th = fv_table(h, 1, k_max, window=wh)
    tg = fv_table(g, 1, k_max, radius=3)
    emb = instantiate_map(chain_map("z2-in-z3"), wh, instantiate_window(g, 4))
    ret = instantiate_map(chain_map("z3-onto-z2"), instantiate_window(g, 2),
                          instantiate_window(h, 3))
    rep = subgroup_inequality_check(th, tg, emb, c_cap=10, retraction=ret)
    print(f"least C = {rep.constant}   retraction bound {rep.retraction['constant']} "
          f"({rep.retraction['failures']} failures)")
    print("   k  FV_H  C k + C  FV_G  rhs  verdict")
    for k, a, x, b, r, v in rep.verdicts:
        print(f"  {k:2d}  {a:4d}  {x:7d}  {b:4d}  {r:3d}  {v}")


if __name__ == "__main__":
    main()
