"""The sequence t(f), its convergence modulus, and the mu-bound read off from it."""
from fractions import Fraction

from nsacomp import mct


def show(bits):
    f = mct.f_from_list(bits)
    c = mct.t_of_f(f)
    k = 3
    modulus = mct.brute_modulus(c, k, 64)
    from_mu = mct.mct_from_mu(mct.brute_mu(4096), c, k)
    bound = mct.mu_from_mct(mct.brute_modulus_functional(64), f)
    values = " ".join(str(c(i)) for i in range(6))
    zero = next((i for i in range(bound + 1) if f(i) == 0), None)
    print(f"f = {''.join(map(str, bits))}111...  t(f) = {values} ...")
    print(f"  modulus at 1/{k}: brute {modulus}, via mu {from_mu}; bound {bound}, zero found at {zero}")


def main():
    for bits in [(1, 1, 0), (0,), (1, 1, 1, 1, 0), (1,)]:
        show(bits)
    geometric = lambda n: 1 - Fraction(1, 2 ** n)
    for k in (2, 4, 8):
        print(f"1 - 2^-n at 1/{k}: brute {mct.brute_modulus(geometric, k, 64)}, "
              f"via mu {mct.mct_from_mu(mct.brute_mu(4096), geometric, k)}")


if __name__ == "__main__":
    main()
