"""Acceptance: given the lemma41 and claim42 fixture CSVs, the CLI exits 0
and writes non-empty SVGs, and the claim42 bound curve dominates every
plotted empirical point."""

from pathlib import Path

from rankplots.cli import main
from rankplots.render import PlotJob, render

DATA = Path(__file__).parent / "data"


def test_plots_acceptance(tmp_path):
    lemma41 = [str(DATA / f"lemma41_n{n}.csv") for n in (4, 6, 8)]
    claim42 = [str(DATA / f"claim42_m{m}.csv") for m in (4, 6, 8)]

    out1 = tmp_path / "lemma41.svg"
    assert main(lemma41 + ["--out", str(out1)]) == 0
    assert out1.exists() and out1.stat().st_size > 0

    out2 = tmp_path / "claim42.svg"
    assert main(claim42 + ["--out", str(out2)]) == 0
    assert out2.exists() and out2.stat().st_size > 0

    data = render(PlotJob(tuple(Path(p) for p in claim42), tmp_path / "check.svg"))
    bound = dict(data["bound"])
    assert data["points"], "no empirical points plotted"
    for x, tail in data["points"]:
        assert tail <= bound[x], f"bound curve fails to dominate at m={x}"
    print("[acceptance] plots: PASS")
