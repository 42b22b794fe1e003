#include "crease/wrinkles.hpp"

#include "crease/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <unordered_map>

namespace crease {

namespace {

constexpr double kPi = std::numbers::pi;

const int kNx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
const int kNy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

// Number of connected arcs the in-component neighbours form around a
// pixel. Junctions have three or more; interior pixels of a thick but
// unbranched line have one.
int neighbor_arc_count(const Grid<int>& labels, int x, int y, int label) {
    bool in[8];
    Pixel cells[8];
    for (int k = 0; k < 8; ++k) {
        const int qx = x + kNx[k], qy = y + kNy[k];
        cells[k] = {qx, qy};
        in[k] = labels.in_bounds(qx, qy) && labels.at(qx, qy) == label;
    }
    int arcs = 0;
    bool seen[8] = {false};
    for (int k = 0; k < 8; ++k) {
        if (!in[k] || seen[k]) continue;
        ++arcs;
        // Flood within the 8-cell ring using 8-adjacency between cells.
        std::vector<int> stack{k};
        seen[k] = true;
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            for (int m = 0; m < 8; ++m) {
                if (!in[m] || seen[m]) continue;
                if (std::abs(cells[c].x - cells[m].x) <= 1
                    && std::abs(cells[c].y - cells[m].y) <= 1) {
                    seen[m] = true;
                    stack.push_back(m);
                }
            }
        }
    }
    return arcs;
}

// Longest 8-connected path through a component: BFS from an arbitrary
// pixel to the farthest one, then from there to its farthest, keeping the
// parent chain.
std::vector<Pixel> diameter_path(const std::vector<Pixel>& pixels,
                                 const Grid<int>& labels, int label) {
    std::unordered_map<long long, int> dist;
    auto key = [](int x, int y) {
        return (static_cast<long long>(y) << 32) | static_cast<unsigned>(x);
    };
    auto bfs = [&](Pixel start, bool build_path) {
        dist.clear();
        std::unordered_map<long long, long long> parent;
        std::queue<Pixel> q;
        q.push(start);
        dist[key(start.x, start.y)] = 0;
        Pixel far = start;
        int far_d = 0;
        while (!q.empty()) {
            const Pixel p = q.front();
            q.pop();
            const int d = dist[key(p.x, p.y)];
            if (d > far_d
                || (d == far_d && (p.y < far.y || (p.y == far.y && p.x < far.x)))) {
                far = p;
                far_d = d;
            }
            for (int k = 0; k < 8; ++k) {
                const int qx = p.x + kNx[k], qy = p.y + kNy[k];
                if (!labels.in_bounds(qx, qy) || labels.at(qx, qy) != label)
                    continue;
                if (dist.count(key(qx, qy))) continue;
                dist[key(qx, qy)] = d + 1;
                if (build_path) parent[key(qx, qy)] = key(p.x, p.y);
                q.push({qx, qy});
            }
        }
        return std::pair{far, parent};
    };
    auto [end1, unused] = bfs(pixels.front(), false);
    auto [end2, parent] = bfs(end1, true);
    std::vector<Pixel> path;
    long long cur = key(end2.x, end2.y);
    const long long root = key(end1.x, end1.y);
    while (true) {
        path.push_back({static_cast<int>(cur & 0xffffffff),
                        static_cast<int>(cur >> 32)});
        if (cur == root) break;
        cur = parent.at(cur);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

double undirected_angle_diff(double a, double b) {
    double d = std::fmod(std::abs(a - b), kPi);
    return std::min(d, kPi - d);
}

// A 12-pixel baseline keeps the estimate stable when the crest hooks a
// little at a junction cut.
double endpoint_tangent(const RidgeSegment& s, bool front) {
    const int n = s.length_px();
    const int k = std::min(12, n - 1);
    const Pixel outer = front ? s.points.front() : s.points.back();
    const Pixel inner = front ? s.points[k] : s.points[n - 1 - k];
    return std::atan2(static_cast<double>(outer.y - inner.y),
                      static_cast<double>(outer.x - inner.x));
}

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

Pca2 pca_points(const std::vector<Pixel>& points) {
    Pca2 out;
    if (points.empty()) return out;
    double sx = 0.0, sy = 0.0;
    for (const auto& p : points) {
        sx += p.x;
        sy += p.y;
    }
    out.cx = sx / points.size();
    out.cy = sy / points.size();
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : points) {
        const double dx = p.x - out.cx, dy = p.y - out.cy;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    sxx /= points.size();
    sxy /= points.size();
    syy /= points.size();
    const double tr = sxx + syy;
    const double det = sxx * syy - sxy * sxy;
    const double gap = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    out.eig_max = 0.5 * tr + gap;
    out.eig_min = 0.5 * tr - gap;
    out.angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    return out;
}

namespace {

// Split a traced polyline wherever the direction turns sharply: arms of
// different wrinkles occasionally get traced through a junction as one
// hairpin chain when the label-based cut misses it.
void split_sharp_turns(std::vector<Pixel> path, double max_turn_deg,
                       int min_segment_px, std::vector<RidgeSegment>& out) {
    const int n = static_cast<int>(path.size());
    const int k = 6;
    const double limit = max_turn_deg * kPi / 180.0;
    std::vector<int> cuts;
    for (int i = k; i + k < n; ++i) {
        const double in_dir = std::atan2(double(path[i].y - path[i - k].y),
                                         double(path[i].x - path[i - k].x));
        const double out_dir = std::atan2(double(path[i + k].y - path[i].y),
                                          double(path[i + k].x - path[i].x));
        double turn = std::abs(out_dir - in_dir);
        if (turn > kPi) turn = 2.0 * kPi - turn;
        if (turn > limit) {
            // Take the sharpest point of a contiguous run of cut marks.
            if (cuts.empty() || i > cuts.back() + k) cuts.push_back(i);
        }
    }
    int begin = 0;
    auto flush = [&](int end) {
        if (end - begin >= min_segment_px) {
            RidgeSegment seg;
            seg.points.assign(path.begin() + begin, path.begin() + end);
            out.push_back(std::move(seg));
        }
    };
    for (int cut : cuts) {
        flush(cut);
        begin = cut + 1;  // the corner pixel itself is dropped
    }
    flush(n);
}

}  // namespace

std::vector<RidgeSegment> link_segments(const TopologyMasks& topo,
                                        int min_segment_px,
                                        double max_turn_deg) {
    auto [labels, count] = label_components(topo.ridge_points, Connectivity::eight);
    std::vector<std::vector<Pixel>> comps(count);
    for (int y = 0; y < labels.height; ++y)
        for (int x = 0; x < labels.width; ++x)
            if (labels.at(x, y) >= 0) comps[labels.at(x, y)].push_back({x, y});

    std::vector<RidgeSegment> out;
    for (int c = 0; c < count; ++c) {
        if (static_cast<int>(comps[c].size()) < min_segment_px) continue;

        // Split at branch pixels, then trace each remaining chain.
        PixelMask sub(labels.width, labels.height);
        bool has_branch = false;
        for (const auto& p : comps[c]) {
            if (neighbor_arc_count(labels, p.x, p.y, c) >= 3) {
                has_branch = true;
            } else {
                sub.set(p.x, p.y);
            }
        }
        if (!has_branch) {
            split_sharp_turns(diameter_path(comps[c], labels, c), max_turn_deg,
                              min_segment_px, out);
            continue;
        }
        auto [sub_labels, sub_count] = label_components(sub, Connectivity::eight);
        std::vector<std::vector<Pixel>> pieces(sub_count);
        for (const auto& p : comps[c])
            if (sub.test(p.x, p.y))
                pieces[sub_labels.at(p.x, p.y)].push_back(p);
        for (int s = 0; s < sub_count; ++s) {
            if (static_cast<int>(pieces[s].size()) < min_segment_px) continue;
            split_sharp_turns(diameter_path(pieces[s], sub_labels, s),
                              max_turn_deg, min_segment_px, out);
        }
    }
    return out;
}

std::vector<RidgeSegment> split_at_junctions(
    const std::vector<RidgeSegment>& segments, const ShapeTypeMap& types,
    int window, int votes, int min_segment_px) {
    const int r = window / 2;
    std::vector<RidgeSegment> out;
    for (const auto& seg : segments) {
        RidgeSegment cur;
        auto flush = [&]() {
            if (cur.length_px() >= min_segment_px) out.push_back(cur);
            cur.points.clear();
        };
        for (const auto& p : seg.points) {
            int n = 0;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const int qx = p.x + dx, qy = p.y + dy;
                    if (!types.labels.in_bounds(qx, qy)) continue;
                    const ShapeType t = types.at(qx, qy);
                    if (t == ShapeType::dome || t == ShapeType::rut
                        || t == ShapeType::cap)
                        ++n;
                }
            }
            if (n >= votes)
                flush();  // junction: cut here and drop the point
            else
                cur.points.push_back(p);
        }
        flush();
    }
    return out;
}

std::vector<std::vector<Pixel>> group_segments(
    const std::vector<RidgeSegment>& segments, const GroupParams& params) {
    const int n = static_cast<int>(segments.size());
    DisjointSet ds(n);
    const double max_angle = params.angle_deg * kPi / 180.0;
    const double bridge_angle = params.bridge_angle_deg * kPi / 180.0;
    std::vector<Pca2> pca(n);
    for (int i = 0; i < n; ++i) pca[i] = pca_points(segments[i].points);

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double best = 1e300;
            int bi = 0, bj = 0;
            for (int ei = 0; ei < 2; ++ei) {
                for (int ej = 0; ej < 2; ++ej) {
                    const Pixel a = ei ? segments[i].points.back()
                                       : segments[i].points.front();
                    const Pixel b = ej ? segments[j].points.back()
                                       : segments[j].points.front();
                    const double d = std::hypot(double(a.x - b.x),
                                                double(a.y - b.y));
                    if (d < best) {
                        best = d;
                        bi = ei;
                        bj = ej;
                    }
                }
            }
            if (best <= params.gap_px) {
                const double ti = endpoint_tangent(segments[i], bi == 0);
                const double tj = endpoint_tangent(segments[j], bj == 0);
                if (undirected_angle_diff(ti, tj) <= max_angle) {
                    ds.unite(i, j);
                    continue;
                }
            }
            if (best <= params.bridge_gap_px) {
                if (undirected_angle_diff(pca[i].angle, pca[j].angle)
                    > bridge_angle)
                    continue;
                // Perpendicular offset of each centroid from the other's line.
                auto offset = [&](const Pca2& line, const Pca2& point) {
                    const double nx = -std::sin(line.angle);
                    const double ny = std::cos(line.angle);
                    return std::abs((point.cx - line.cx) * nx
                                    + (point.cy - line.cy) * ny);
                };
                if (offset(pca[i], pca[j]) <= params.bridge_offset_px
                    && offset(pca[j], pca[i]) <= params.bridge_offset_px)
                    ds.unite(i, j);
            }
        }
    }
    std::unordered_map<int, std::vector<Pixel>> groups;
    for (int i = 0; i < n; ++i) {
        auto& g = groups[ds.find(i)];
        g.insert(g.end(), segments[i].points.begin(), segments[i].points.end());
    }
    std::vector<std::vector<Pixel>> out;
    out.reserve(groups.size());
    for (int i = 0; i < n; ++i) {
        const auto it = groups.find(i);
        if (it != groups.end()) out.push_back(std::move(it->second));
    }
    return out;
}

double QuinticCurve::evaluate(double u) const {
    double acc = 0.0;
    for (int k = 5; k >= 0; --k) acc = acc * u + coeffs[k];
    return acc;
}

double QuinticCurve::local_u(double px, double py) const {
    return std::cos(axis_angle) * (px - origin_x)
           + std::sin(axis_angle) * (py - origin_y);
}

QuinticCurve fit_quintic(const std::vector<Pixel>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 8)
        throw std::invalid_argument("fit_quintic: need at least 8 points, got "
                                    + std::to_string(n));
    const Pca2 pca = pca_points(points);
    QuinticCurve curve;
    curve.origin_x = pca.cx;
    curve.origin_y = pca.cy;
    curve.axis_angle = pca.angle;

    const double ca = std::cos(pca.angle), sa = std::sin(pca.angle);
    std::vector<double> u(n), v(n);
    double umax = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = points[i].x - pca.cx, dy = points[i].y - pca.cy;
        u[i] = ca * dx + sa * dy;
        v[i] = -sa * dx + ca * dy;
        umax = std::max(umax, std::abs(u[i]));
    }
    const double scale = std::max(1.0, umax);

    Eigen::MatrixXd A(n, 6);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        const double t = u[i] / scale;
        double pw = 1.0;
        for (int k = 0; k < 6; ++k) {
            A(i, k) = pw;
            pw *= t;
        }
        b(i) = v[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < 6)
        throw FitError("fit_quintic: rank-deficient system (fewer than 6 "
                       "distinct abscissae)");
    const Eigen::VectorXd c = qr.solve(b);

    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double acc = 0.0, pw = 1.0;
        for (int k = 0; k < 6; ++k) {
            acc += c(k) * pw;
            pw *= u[i] / scale;
        }
        const double r = v[i] - acc;
        sq += r * r;
    }
    curve.rmse_px = std::sqrt(sq / n);

    double pw = 1.0;
    for (int k = 0; k < 6; ++k) {
        curve.coeffs[k] = c(k) / pw;
        pw *= scale;
    }
    curve.u_min = *std::min_element(u.begin(), u.end());
    curve.u_max = *std::max_element(u.begin(), u.end());
    return curve;
}

double tangent_direction(const QuinticCurve& c, double u) {
    const double slope = ((((5.0 * c.coeffs[5] * u + 4.0 * c.coeffs[4]) * u
                            + 3.0 * c.coeffs[3]) * u
                           + 2.0 * c.coeffs[2]) * u)
                         + c.coeffs[1];
    return fold_direction(c.axis_angle + std::atan(slope));
}

HoughSplit hough_split(const std::vector<Pixel>& points,
                       const HoughParams& params) {
    if (points.empty())
        throw std::invalid_argument("hough_split: empty point set");
    if (params.thres_rmse_px <= 0.0 || params.thres_alpha_deg <= 0.0)
        throw std::invalid_argument("hough_split: thresholds must be positive");

    HoughSplit out;
    bool fit_ok = false;
    if (static_cast<int>(points.size()) >= 8) {
        try {
            const QuinticCurve fit = fit_quintic(points);
            out.rmse_px = fit.rmse_px;
            fit_ok = true;
        } catch (const FitError&) {
            fit_ok = false;
        }
        if (fit_ok && out.rmse_px <= params.thres_rmse_px) {
            out.outcome = HoughOutcome::unsplit;
            out.part1 = points;
            return out;
        }
    }
    if (!fit_ok && static_cast<int>(points.size()) >= 8) {
        out.outcome = HoughOutcome::unsplit;
        out.part1 = points;
        return out;
    }
    if (static_cast<int>(points.size()) < 8) {
        out.outcome = HoughOutcome::unsplit;
        out.part1 = points;
        return out;
    }

    const Pca2 pca = pca_points(points);
    double rho_max = params.bin_beta_px;
    for (const auto& p : points)
        rho_max = std::max(rho_max,
                           std::hypot(p.x - pca.cx, p.y - pca.cy));
    rho_max += params.bin_beta_px;

    const int na = std::max(4, static_cast<int>(std::lround(180.0 / params.bin_alpha_deg)));
    const int nb = static_cast<int>(std::ceil(2.0 * rho_max / params.bin_beta_px)) + 1;
    std::vector<int> acc(static_cast<std::size_t>(na) * nb, 0);
    std::vector<double> cos_a(na), sin_a(na);
    for (int a = 0; a < na; ++a) {
        const double alpha = (a + 0.5) * kPi / na;
        cos_a[a] = std::cos(alpha);
        sin_a[a] = std::sin(alpha);
    }
    auto bin_of = [&](double rho) {
        return std::clamp(static_cast<int>((rho + rho_max) / params.bin_beta_px),
                          0, nb - 1);
    };
    for (const auto& p : points) {
        const double dx = p.x - pca.cx, dy = p.y - pca.cy;
        for (int a = 0; a < na; ++a) {
            const double rho = dx * cos_a[a] + dy * sin_a[a];
            ++acc[static_cast<std::size_t>(a) * nb + bin_of(rho)];
        }
    }

    int best1 = -1, cnt1 = -1;
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b) {
            const int v = acc[static_cast<std::size_t>(a) * nb + b];
            if (v > cnt1) {
                cnt1 = v;
                best1 = a * nb + b;
            }
        }
    const int a1 = best1 / nb, b1 = best1 % nb;
    const double alpha1_deg = (a1 + 0.5) * 180.0 / na;

    auto circ_dist = [](double x, double y) {
        double d = std::fmod(std::abs(x - y), 180.0);
        return std::min(d, 180.0 - d);
    };
    int best2 = -1, cnt2 = -1;
    for (int a = 0; a < na; ++a) {
        const double alpha_deg = (a + 0.5) * 180.0 / na;
        if (circ_dist(alpha_deg, alpha1_deg) <= params.thres_alpha_deg) continue;
        for (int b = 0; b < nb; ++b) {
            const int v = acc[static_cast<std::size_t>(a) * nb + b];
            if (v > cnt2) {
                cnt2 = v;
                best2 = a * nb + b;
            }
        }
    }
    if (best2 < 0 || cnt2 < params.second_peak_ratio * cnt1 || cnt2 < 2) {
        out.outcome = HoughOutcome::unsplit_warning;
        out.part1 = points;
        return out;
    }
    const int a2 = best2 / nb, b2 = best2 % nb;

    const double rho1 = (b1 + 0.5) * params.bin_beta_px - rho_max;
    const double rho2 = (b2 + 0.5) * params.bin_beta_px - rho_max;
    for (const auto& p : points) {
        const double dx = p.x - pca.cx, dy = p.y - pca.cy;
        const double d1 = std::abs(dx * cos_a[a1] + dy * sin_a[a1] - rho1);
        const double d2 = std::abs(dx * cos_a[a2] + dy * sin_a[a2] - rho2);
        (d1 <= d2 ? out.part1 : out.part2).push_back(p);
    }
    if (out.part1.empty() || out.part2.empty()) {
        out.outcome = HoughOutcome::unsplit_warning;
        out.part1 = points;
        out.part2.clear();
        return out;
    }
    // Line direction is perpendicular to its normal angle.
    auto line_dir = [](double alpha_deg) {
        double d = alpha_deg + 90.0;
        while (d >= 90.0) d -= 180.0;
        while (d < -90.0) d += 180.0;
        return d;
    };
    out.outcome = HoughOutcome::split;
    out.angle1_deg = line_dir((a1 + 0.5) * 180.0 / na);
    out.angle2_deg = line_dir((a2 + 0.5) * 180.0 / na);
    return out;
}

namespace {

void refine_group(const std::vector<Pixel>& points, int depth,
                  const PipelineConfig& cfg, const HoughParams& hp,
                  std::vector<std::pair<std::vector<Pixel>, bool>>& out) {
    if (static_cast<int>(points.size()) < cfg.min_wrinkle_points) return;
    QuinticCurve fit;
    try {
        fit = fit_quintic(points);
    } catch (const FitError&) {
        return;  // compact blob, no curve to describe
    }
    if (fit.rmse_px <= cfg.hough_rmse_px || depth >= cfg.max_split_depth) {
        out.emplace_back(points, fit.rmse_px > cfg.hough_rmse_px);
        return;
    }
    const HoughSplit hs = hough_split(points, hp);
    if (hs.outcome == HoughOutcome::split
        && hs.part1.size() < points.size() && hs.part2.size() < points.size()) {
        refine_group(hs.part1, depth + 1, cfg, hp, out);
        refine_group(hs.part2, depth + 1, cfg, hp, out);
        return;
    }
    out.emplace_back(points, true);
}

Vec2 normalized_principal_dir(const Pca2& pca) {
    Vec2 d{std::cos(pca.angle), std::sin(pca.angle)};
    if (d.x < 0.0 || (std::abs(d.x) < 1e-12 && d.y < 0.0)) {
        d.x = -d.x;
        d.y = -d.y;
    }
    return d;
}

}  // namespace

WrinkleMetrics quantify_wrinkle(const Wrinkle& w) {
    if (w.triplets.empty())
        throw UnquantifiedWrinkleError("quantify_wrinkle: wrinkle has no valid triplets");
    WrinkleMetrics m;
    const int n = static_cast<int>(w.triplets.size());
    for (const auto& t : w.triplets) {
        m.width_m += t.width_m;
        m.height_m += t.height_m;
        m.mean_slack_m += t.slack_m;
    }
    m.width_m /= n;
    m.height_m /= n;
    m.mean_slack_m /= n;

    // Parabolic cross-section: area 2/3 h w, integrated along the crest
    // with vertex-centred spacing.
    auto seg_len = [&](int i, int j) {
        const auto& a = w.triplets[i].ridge_w;
        const auto& b = w.triplets[j].ridge_w;
        return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y)
                         + (a.z - b.z) * (a.z - b.z));
    };
    for (int i = 0; i < n; ++i) {
        double ds = 0.0;
        if (i > 0) ds += 0.5 * seg_len(i - 1, i);
        if (i + 1 < n) ds += 0.5 * seg_len(i, i + 1);
        m.volume_m3 +=
            (2.0 / 3.0) * w.triplets[i].height_m * w.triplets[i].width_m * ds;
    }
    return m;
}

std::vector<Wrinkle> detect_wrinkles(const TopologyMasks& topo,
                                     const ShapeTypeMap& types,
                                     const CurvatureMaps& curv,
                                     const HeightField& h,
                                     const PipelineConfig& cfg) {
    (void)curv;
    // Clearing junction pixels before linking keeps crossing arms from
    // being traced through one another; split_at_junctions then only has
    // leftovers to cut.
    TopologyMasks filtered = topo;
    const int jr = cfg.junction_window / 2;
    for (int y = 0; y < filtered.ridge_points.height(); ++y) {
        for (int x = 0; x < filtered.ridge_points.width(); ++x) {
            if (!filtered.ridge_points.test(x, y)) continue;
            int votes = 0;
            for (int dy = -jr; dy <= jr; ++dy)
                for (int dx = -jr; dx <= jr; ++dx) {
                    const int qx = x + dx, qy = y + dy;
                    if (!types.labels.in_bounds(qx, qy)) continue;
                    const ShapeType t = types.at(qx, qy);
                    if (t == ShapeType::dome || t == ShapeType::rut
                        || t == ShapeType::cap)
                        ++votes;
                }
            if (votes >= cfg.junction_votes)
                filtered.ridge_points.set(x, y, false);
        }
    }
    auto segments = link_segments(filtered, cfg.min_segment_px, cfg.max_turn_deg);
    segments = split_at_junctions(segments, types, cfg.junction_window,
                                  cfg.junction_votes, cfg.min_segment_px);
    GroupParams gp;
    gp.gap_px = cfg.group_gap_px;
    gp.angle_deg = cfg.group_angle_deg;
    gp.bridge_gap_px = cfg.group_bridge_px;
    gp.bridge_angle_deg = cfg.group_bridge_angle_deg;
    gp.bridge_offset_px = cfg.group_bridge_offset_px;
    auto groups = group_segments(segments, gp);

    HoughParams hp;
    hp.thres_rmse_px = cfg.hough_rmse_px;
    hp.thres_alpha_deg = cfg.hough_alpha_deg;
    hp.bin_alpha_deg = cfg.hough_bin_alpha_deg;
    hp.bin_beta_px = cfg.hough_bin_beta_px;
    hp.second_peak_ratio = cfg.hough_second_peak_ratio;

    std::vector<std::pair<std::vector<Pixel>, bool>> finals;
    for (const auto& g : groups) refine_group(g, 0, cfg, hp, finals);

    WalkParams wp;
    wp.max_steps = cfg.max_walk_steps;
    wp.gravity_tol_m = cfg.gravity_tol_m;

    std::vector<Wrinkle> out;
    for (auto& [pts, warn] : finals) {
        Wrinkle w;
        w.split_warning = warn;
        w.curve = fit_quintic(pts);
        // Order the points along the local abscissa.
        std::sort(pts.begin(), pts.end(), [&](const Pixel& a, const Pixel& b) {
            const double ua = w.curve.local_u(a.x, a.y);
            const double ub = w.curve.local_u(b.x, b.y);
            if (ua != ub) return ua < ub;
            return a.y != b.y ? a.y < b.y : a.x < b.x;
        });
        w.points = pts;

        const int n = static_cast<int>(pts.size());
        std::vector<std::optional<Triplet>> found(n);
#pragma omp parallel for schedule(dynamic, 8)
        for (int i = 0; i < n; ++i) {
            try {
                const double u = w.curve.local_u(pts[i].x, pts[i].y);
                const double dir = tangent_direction(w.curve, u) + kPi / 2.0;
                found[i] = match_triplet(pts[i], dir, topo, types, h, wp);
            } catch (...) {
                found[i] = std::nullopt;
            }
        }
        for (auto& t : found)
            if (t) w.triplets.push_back(*t);

        try {
            const WrinkleMetrics m = quantify_wrinkle(w);
            w.width_m = m.width_m;
            w.height_m = m.height_m;
            w.volume_m3 = m.volume_m3;
            w.mean_slack_m = m.mean_slack_m;
            w.score = m.volume_m3;
        } catch (const UnquantifiedWrinkleError&) {
            w.score = 0.0;
        }
        w.principal_dir = normalized_principal_dir(pca_points(w.points));
        out.push_back(std::move(w));
    }

    std::sort(out.begin(), out.end(), [](const Wrinkle& a, const Wrinkle& b) {
        if (a.score != b.score) return a.score > b.score;
        const Pca2 pa = pca_points(a.points), pb = pca_points(b.points);
        if (pa.cy != pb.cy) return pa.cy < pb.cy;
        return pa.cx < pb.cx;
    });
    return out;
}

}  // namespace crease
