"""Write data/urban_points.csv: seeded synthetic point events over a lon/lat window.

Hotspots are anisotropic Gaussian clusters in a local metric frame on top of a uniform
background. A few rows fall outside the study window so that range filters have
something to do.
"""

import argparse
import csv
import math
import random

WINDOW = (-0.54, 51.28, 0.33, 51.70)
CORE = (-0.35, 51.40, 0.15, 51.62)  # hotspot centres are drawn here
M_PER_DEG_LAT = 6371008.8 * math.pi / 180.0
N_HOTSPOTS = 20
MIN_SEPARATION_M = 1500.0
OUTSIDE_SHARE = 0.02


def local_to_lonlat(lon0, lat0, dx, dy):
    kx = M_PER_DEG_LAT * math.cos(math.radians(lat0))
    return lon0 + dx / kx, lat0 + dy / M_PER_DEG_LAT


def distance_m(a, b):
    kx = M_PER_DEG_LAT * math.cos(math.radians(0.5 * (a[1] + b[1])))
    return math.hypot((a[0] - b[0]) * kx, (a[1] - b[1]) * M_PER_DEG_LAT)


def make_hotspots(rng):
    """Returns (lon, lat, sd_major_m, sd_minor_m, angle_deg, share) tuples."""
    spots = []
    while len(spots) < N_HOTSPOTS:
        c = (rng.uniform(CORE[0], CORE[2]), rng.uniform(CORE[1], CORE[3]))
        if all(distance_m(c, s) >= MIN_SEPARATION_M for s in spots):
            share = 0.012 - 0.008 * len(spots) / (N_HOTSPOTS - 1)
            major = rng.uniform(180.0, 350.0)
            spots.append((c[0], c[1], major, major * rng.uniform(0.5, 0.9),
                          rng.uniform(0.0, 180.0), share))
    return spots


def sample(rng, hotspots, n):
    hotspot_share = sum(h[5] for h in hotspots)
    kinds = ["hotspot", "background", "outside"]
    weights = [hotspot_share, 1.0 - hotspot_share - OUTSIDE_SHARE, OUTSIDE_SHARE]
    lo_lon, lo_lat, hi_lon, hi_lat = WINDOW
    for _ in range(n):
        kind = rng.choices(kinds, weights)[0]
        if kind == "hotspot":
            lon0, lat0, a, b, ang, _ = rng.choices(hotspots, [h[5] for h in hotspots])[0]
            u, v = rng.gauss(0.0, a), rng.gauss(0.0, b)
            t = math.radians(ang)
            lon, lat = local_to_lonlat(lon0, lat0, u * math.cos(t) - v * math.sin(t),
                                       u * math.sin(t) + v * math.cos(t))
            lon = min(max(lon, lo_lon), hi_lon)
            lat = min(max(lat, lo_lat), hi_lat)
        elif kind == "background":
            lon, lat = rng.uniform(lo_lon, hi_lon), rng.uniform(lo_lat, hi_lat)
        else:
            lon = rng.uniform(lo_lon - 0.3, hi_lon + 0.3)
            lat = rng.choice([rng.uniform(lo_lat - 0.2, lo_lat - 0.01),
                              rng.uniform(hi_lat + 0.01, hi_lat + 0.2)])
        yield lon, lat, rng.choice([1, 2, 2, 3, 3, 3, 3]), rng.choice([20, 20, 30, 30, 40])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=30000)
    ap.add_argument("--seed", type=int, default=20240607)
    ap.add_argument("--out", default="data/urban_points.csv")
    ap.add_argument("--hotspots-out", default="data/urban_hotspots.csv")
    args = ap.parse_args()
    rng = random.Random(args.seed)
    hotspots = make_hotspots(rng)
    with open(args.hotspots_out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["hotspot_id", "longitude", "latitude", "sd_major_m", "sd_minor_m",
                    "angle_deg", "share"])
        for i, h in enumerate(hotspots):
            w.writerow([i, f"{h[0]:.6f}", f"{h[1]:.6f}", f"{h[2]:.1f}", f"{h[3]:.1f}",
                        f"{h[4]:.1f}", f"{h[5]:.6f}"])
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["event_id", "longitude", "latitude", "severity", "speed_limit"])
        for i, (lon, lat, sev, speed) in enumerate(sample(rng, hotspots, args.n)):
            w.writerow([f"E{i:06d}", f"{lon:.6f}", f"{lat:.6f}", sev, speed])


if __name__ == "__main__":
    main()
