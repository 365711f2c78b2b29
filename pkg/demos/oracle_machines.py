"""Program codes, bounded runs, the s-m-n sequence programs and MU^A verdicts."""
from nsacomp import machines as mc
from nsacomp.pairing import decode_rational


def main():
    for name, src in mc.CANONICAL_SOURCES[:5]:
        program = mc.parse_program(src)
        print(f"{name:12s} {src:45s} index {mc.encode(program)}")

    print("\necho on 7 under all0, 1 step:", mc.run_bounded(mc.E_ECHO, 7, mc.ALL0, 1))
    print("loop on 3, 100 steps:", mc.run_bounded(mc.E_LOOP, 3, mc.ALL0, 100))
    print("query on 4 under all1:", mc.run_bounded(mc.E_QUERY, 4, mc.ALL1, 2))

    e, n = mc.E_ECHO, 5
    program = mc.smn_program(e, n)
    print(f"\ns-m-n program for (echo, {n}): {len(program)} instructions")
    for m in range(9):
        r = mc.run_bounded(program, m, mc.ALL0, mc.smn_step_bound(e, n, m))
        print(f"  m={m}: {decode_rational(r.output)} in {r.steps} steps")

    for nu in (5, 1):
        v = mc.check_mu_a(lambda _e, _n, nu=nu: nu, e, n, mc.ALL0, 64)
        print(f"MU^A check with nu = {nu}: {v.verdict}")


if __name__ == "__main__":
    main()
