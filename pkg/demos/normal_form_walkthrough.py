"""Normalize MCT_ns -> Pi01-TRANS and print every rewrite step."""
from nsacomp import formulas as fm
from nsacomp import normalizer as nz
from nsacomp import suites


def main():
    trace = nz.normalize_formula(suites.input_formula("mct_to_trans"))
    print("input:")
    print(" ", fm.format_formula(trace.steps[0].before))
    for i, step in enumerate(trace.steps, 1):
        where = "/".join(map(str, step.position)) or "root"
        print(f"\n{i:2d}. {step.rule} at {where}")
        print(" ", fm.format_formula(step.after))
    print("\nnormal form:", fm.is_normal_form(trace.final))
    print("matches golden:", fm.alpha_eq(trace.final, suites.golden("mct_normal_form")))
    print("replays:", nz.replay(trace))

    restricted = nz.normalize_formula(suites.input_formula("restricted_mct"))
    print("\nrestricted form, normalized:")
    print(" ", fm.format_formula(restricted.final))
    print("with the bound term s substituted:")
    print(" ", fm.format_formula(nz.bound_instance(restricted.final)))


if __name__ == "__main__":
    main()
