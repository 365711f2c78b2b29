"""Associates, partial application and the desk run over the canonical programs."""
from nsacomp import ecf
from nsacomp import machines as mc
from nsacomp import mct


def main():
    head = ecf.Associate(lambda s: s[0] + 1 if s else 0, name="head")
    beta = lambda i: 3 if i == 0 else 9
    print("head associate applied to 3,9,9,...:", ecf.apply_associate(head, beta))
    print("head | beta at n=0..4:", [ecf.restrict_apply(head, beta)(n) for n in range(5)])

    F = lambda b: b(0) + b(2)
    a = ecf.associate_of(F, lambda b: 3)
    print("associate of b(0)+b(2) on 1,2,3,0,...:", ecf.apply_associate(a, ecf.extend_zeros([1, 2, 3])))

    f, g, mf, mg = ecf.mu_discontinuity_witness(mct.brute_mu(256), 10)
    print(f"mu separates 1^omega and 1^11 0^omega: {mf} vs {mg}")

    rows = ecf.run_cor45(e_max=8, n_max=3, s_cap=256)
    counts = mct.summarize(rows)
    print(f"desk run: {len(rows)} cells, {counts}")
    for r in rows[:6]:
        print("  ", {k: r[k] for k in ("e", "n", "oracle", "nu", "verdict", "halting_step")})


if __name__ == "__main__":
    main()
