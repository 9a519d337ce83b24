"""End-to-end audit of a synthetic dataset against its reference.

Builds a five-dimensional sign-flip scenario, runs the complete diagnostic
suite (stability verdict, KS profile, subspace angles, slopes, bootstrap,
subset sensitivity, kernel tests), and prints the Markdown report. The
same audit is available from the command line:

    depfid synth --scenario sign-flip --rho 0.6 --n 2000 --d 5 --seed 42 \
        --out-ref ref.csv --out-syn syn.csv
    depfid audit --real ref.csv --syn syn.csv --subsets 50 --subset-size 3 \
        --mmd --copula-mmd --format md
"""

from depfid import emit_report, make_sign_flip_pair, run_audit

pair = make_sign_flip_pair(0.6, 1.0, 2_000, seed=42, d=5)
report = run_audit(
    pair.samples_ref,
    pair.samples_syn,
    bootstrap_b=500,
    subsets=(50, 3),
    mmd=True,
    copula_mmd_flag=True,
    seed=42,
)
print(emit_report(report, "markdown"))
