"""Run both reconstruction directions on the built-in fixtures.

system -> witness -> system must land in the same semimodule over the
aligned curve; witness -> system -> witness must recover the degree and an
isometric target tree.  Exits nonzero if any comparison fails.
"""

from tropcurve import fixtures, roundtrip_system, roundtrip_witness


def main() -> int:
    ok = True
    for name, make in (
        ("segment", fixtures.seg2_system),
        ("doubled segment", fixtures.seg2_double),
        ("circle fold", fixtures.circ4_fold_system),
        ("tailed circle", fixtures.tail_system),
    ):
        rt = roundtrip_system(make())
        print(f"system direction, {name}: {'ok' if rt.ok else 'FAIL'} (degree {rt.degree})")
        ok = ok and rt.ok

    mod, phi_t, star = fixtures.theta_quotient()
    rt = roundtrip_witness(mod, phi_t, star)
    print(
        f"witness direction, theta quotient: {'ok' if rt.ok else 'FAIL'} "
        f"(degree {rt.degree}, isometric target: {rt.detail['isometric']})"
    )
    ok = ok and rt.ok
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
