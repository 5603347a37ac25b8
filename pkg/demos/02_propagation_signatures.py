"""Reproducing the empirical propagation signatures on a synthetic corpus.

Simulates 500 cascades on a homophilic graph and shows the three
signatures the delivery strategies exploit:

  * cascade size anti-correlates with the clustering of the social group
    it reaches (small cascades live in tight groups),
  * unpopular videos spread over much shorter distances than popular
    ones, and
  * re-share lags follow a power law in the lag since exposure.

Writes plot-ready CSVs (and PNGs when matplotlib is available) to
demo_output/.
"""

from pathlib import Path

import numpy as np

from socialcast.analysis import (LagHistogram, class_filter, distance_cdf,
                                 fig2_experiment, fit_zipf, reshare_lags)
from socialcast.config import (GraphConfig, PropagationConfig, ScenarioConfig,
                               VideoConfig)
from socialcast.propagation import popularity
from socialcast.records import write_csv
from socialcast.runner import simulate_cascades
from socialcast.seeds import derive_seed

out = Path(__file__).resolve().parent / "demo_output"
out.mkdir(exist_ok=True)

cfg = ScenarioConfig(
    seed=42, horizon_slots=200,
    graph=GraphConfig(n_users=2000, n_regions=10, triad_prob=0.8,
                      homophily_scale_km=5.0),
    propagation=PropagationConfig(p_watch=0.9, p_share=0.2),
    videos=VideoConfig(count=500))
print("simulating 500 cascades over 2000 users...")
graph, videos, trees = simulate_cascades(cfg)
corpus = list(trees.values())
pops = [popularity(t) for t in corpus]
print(f"popularity: min={min(pops)} median={int(np.median(pops))} max={max(pops)}")

# --- size vs. group clustering -----------------------------------------
points, rho = fig2_experiment(corpus, graph, derive_seed(cfg.seed, "fig2"))
write_csv(out / "size_vs_clustering.csv", ("size", "clustering_coefficient"),
          [(s, repr(c)) for s, c in points])
print(f"\nsize vs clustering over a stratified 50-cascade sample: "
      f"spearman rho = {rho:+.3f}")
print("  (negative: small cascades stay inside tightly knit groups)")

# --- distance CDFs by popularity class ----------------------------------
for name in ("unpopular", "popular"):
    cdf = distance_cdf(corpus, graph, class_filter(name, pops))
    write_csv(out / f"distance_cdf_{name}.csv", ("km", "fraction"),
              [(repr(v), repr(f)) for v, f in zip(cdf.values, cdf.fractions)])
    at_zero = cdf.fractions[0] if cdf.values[0] == 0.0 else 0.0
    print(f"{name:9s}: median distance {cdf.median():6.2f} km, "
          f"{100 * at_zero:4.1f}% of pairs at 0 km")

# --- re-share lag law ----------------------------------------------------
lags = [l for t in corpus for l in reshare_lags(t)]
hist = LagHistogram.from_lags(lags)
write_csv(out / "lag_histogram.csv", ("lag", "count"),
          list(zip(hist.lags, hist.counts)))
print(f"\nper-edge re-share lags: {len(lags)} samples, "
      f"fitted shape s = {fit_zipf(hist):.3f} "
      f"(configured {cfg.propagation.lag_shape}; late-starting cascades "
      "censor long lags, steepening the fit)")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print(f"\nCSV outputs in {out} (matplotlib not installed, skipping PNGs)")
else:
    fig, axes = plt.subplots(1, 3, figsize=(14, 4))
    axes[0].scatter([s for s, _ in points], [c for _, c in points], s=12)
    axes[0].set(xscale="log", xlabel="cascade size",
                ylabel="group clustering coefficient",
                title=f"size vs clustering (rho={rho:+.2f})")
    for name, style in (("unpopular", "-"), ("popular", "--")):
        cdf = distance_cdf(corpus, graph, class_filter(name, pops))
        axes[1].step(cdf.values, cdf.fractions, style, where="post", label=name)
    axes[1].set(xlabel="distance (km)", ylabel="CDF",
                title="pairwise participant distances")
    axes[1].legend()
    axes[2].loglog(hist.lags, hist.counts, "o", ms=3)
    axes[2].set(xlabel="lag (slots)", ylabel="re-shares",
                title=f"lag law (s={fit_zipf(hist):.2f})")
    fig.tight_layout()
    fig.savefig(out / "signatures.png", dpi=150)
    print(f"\nwrote CSVs and signatures.png to {out}")
