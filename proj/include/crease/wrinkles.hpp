#pragma once

#include "crease/config.hpp"
#include "crease/triplets.hpp"

#include <array>
#include <vector>

namespace crease {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Ordered polyline of 8-connected ridge pixels.
struct RidgeSegment {
    std::vector<Pixel> points;
    int length_px() const { return static_cast<int>(points.size()); }
};

/// Fifth-order polynomial description of a wrinkle in a local frame whose
/// abscissa is the principal axis of the points.
struct QuinticCurve {
    double origin_x = 0.0;  // centroid, px
    double origin_y = 0.0;
    double axis_angle = 0.0;  // radians
    // coeffs[k] multiplies u^k in the local frame (coeffs[5] is the
    // leading quintic coefficient).
    std::array<double, 6> coeffs{};
    double rmse_px = 0.0;
    double u_min = 0.0;
    double u_max = 0.0;

    double a() const { return coeffs[5]; }
    double b() const { return coeffs[4]; }
    double c() const { return coeffs[3]; }
    double d() const { return coeffs[2]; }
    double e() const { return coeffs[1]; }
    double f() const { return coeffs[0]; }

    double evaluate(double u) const;
    /// Local abscissa of an image-space pixel.
    double local_u(double px, double py) const;
};

struct Wrinkle {
    std::vector<Pixel> points;  // ordered along the principal axis
    QuinticCurve curve;
    std::vector<Triplet> triplets;
    double width_m = 0.0;
    double height_m = 0.0;
    double volume_m3 = 0.0;
    double mean_slack_m = 0.0;
    Vec2 principal_dir{1.0, 0.0};
    double score = 0.0;
    bool split_warning = false;  // fit stayed above the rmse gate
};

/// 2D PCA of pixel coordinates.
struct Pca2 {
    double cx = 0.0, cy = 0.0;
    double angle = 0.0;       // major-axis direction, radians
    double eig_max = 0.0;
    double eig_min = 0.0;
};
Pca2 pca_points(const std::vector<Pixel>& points);

std::vector<RidgeSegment> link_segments(const TopologyMasks& topo,
                                        int min_segment_px = 5,
                                        double max_turn_deg = 50.0);

/// Cuts segments where the surrounding shape types vote dome/rut (wrinkle
/// junctions) and removes the cut points.
std::vector<RidgeSegment> split_at_junctions(
    const std::vector<RidgeSegment>& segments, const ShapeTypeMap& types,
    int window = 5, int votes = 3, int min_segment_px = 5);

struct GroupParams {
    double gap_px = 24.0;
    double angle_deg = 20.0;
    // Collinear bridging across junction cuts, where the crest hole can be
    // several sigma wide: same line direction, small perpendicular offset.
    double bridge_gap_px = 48.0;
    double bridge_angle_deg = 12.0;
    double bridge_offset_px = 4.0;
};

/// Greedy endpoint merge: segments join when their nearest endpoints are
/// close and the endpoint tangents are nearly parallel, or when they are
/// collinear pieces separated by a junction cut.
std::vector<std::vector<Pixel>> group_segments(
    const std::vector<RidgeSegment>& segments, const GroupParams& params = {});

QuinticCurve fit_quintic(const std::vector<Pixel>& points);

/// Tangent angle of the fitted curve at local abscissa u, mapped back
/// to the image frame.
double tangent_direction(const QuinticCurve& c, double u);

enum class HoughOutcome { split, unsplit, unsplit_warning };

struct HoughSplit {
    HoughOutcome outcome = HoughOutcome::unsplit;
    std::vector<Pixel> part1;
    std::vector<Pixel> part2;
    double angle1_deg = 0.0;  // recovered line directions, [-90, 90)
    double angle2_deg = 0.0;
    double rmse_px = 0.0;
};

struct HoughParams {
    double thres_rmse_px = 2.0;
    double thres_alpha_deg = 20.0;
    double bin_alpha_deg = 1.0;
    double bin_beta_px = 2.0;
    double second_peak_ratio = 0.25;
};

/// Quintic-gated Hough line analysis: returns the input unsplit when the
/// fit is already acceptable, otherwise assigns each point to the nearer
/// of the two dominant line directions. When no second peak clears the
/// non-locality constraint the outcome is unsplit_warning.
HoughSplit hough_split(const std::vector<Pixel>& points,
                       const HoughParams& params = {});

std::vector<Wrinkle> detect_wrinkles(const TopologyMasks& topo,
                                     const ShapeTypeMap& types,
                                     const CurvatureMaps& curv,
                                     const HeightField& h,
                                     const PipelineConfig& cfg);

struct WrinkleMetrics {
    double width_m = 0.0;
    double height_m = 0.0;
    double volume_m3 = 0.0;
    double mean_slack_m = 0.0;
};

/// Mean triplet width/height plus the parabolic-section volume; throws
/// UnquantifiedWrinkleError when the wrinkle has no valid triplets.
WrinkleMetrics quantify_wrinkle(const Wrinkle& w);

}  // namespace crease
