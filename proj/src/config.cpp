#include "crease/config.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace crease {

namespace {

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string()
                                          : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = val;
    }
    return kv;
}

}  // namespace

void apply_config_text(PipelineConfig& cfg, const std::string& text) {
    for (const auto& [key, val] : parse_kv(text)) {
        if (key == "pitch") cfg.pitch = std::stod(val);
        else if (key == "depth_offset") cfg.depth_offset = std::stod(val);
        else if (key == "spline_spacing") cfg.spline_spacing = std::stoi(val);
        else if (key == "spline_degree") cfg.spline_degree = std::stoi(val);
        else if (key == "spline_lambda") cfg.spline_lambda = std::stod(val);
        else if (key == "sigma") cfg.sigma = std::stod(val);
        else if (key == "laplace_window") cfg.laplace_window = std::stoi(val);
        else if (key == "rank_window") cfg.rank_window = std::stoi(val);
        else if (key == "min_ridge_curvature") cfg.min_ridge_curvature = std::stod(val);
        else if (key == "max_walk_steps") cfg.max_walk_steps = std::stoi(val);
        else if (key == "gravity_tol") cfg.gravity_tol_m = std::stod(val);
        else if (key == "min_segment_px") cfg.min_segment_px = std::stoi(val);
        else if (key == "max_turn_deg") cfg.max_turn_deg = std::stod(val);
        else if (key == "junction_window") cfg.junction_window = std::stoi(val);
        else if (key == "junction_votes") cfg.junction_votes = std::stoi(val);
        else if (key == "group_gap_px") cfg.group_gap_px = std::stod(val);
        else if (key == "group_angle_deg") cfg.group_angle_deg = std::stod(val);
        else if (key == "group_bridge_px") cfg.group_bridge_px = std::stod(val);
        else if (key == "group_bridge_angle_deg") cfg.group_bridge_angle_deg = std::stod(val);
        else if (key == "group_bridge_offset_px") cfg.group_bridge_offset_px = std::stod(val);
        else if (key == "min_wrinkle_points") cfg.min_wrinkle_points = std::stoi(val);
        else if (key == "hough_rmse_px") cfg.hough_rmse_px = std::stod(val);
        else if (key == "hough_alpha_deg") cfg.hough_alpha_deg = std::stod(val);
        else if (key == "hough_bin_alpha_deg") cfg.hough_bin_alpha_deg = std::stod(val);
        else if (key == "hough_bin_beta_px") cfg.hough_bin_beta_px = std::stod(val);
        else if (key == "hough_second_peak_ratio") cfg.hough_second_peak_ratio = std::stod(val);
        else if (key == "max_split_depth") cfg.max_split_depth = std::stoi(val);
        else if (key == "aperture") cfg.aperture_m = std::stod(val);
        else if (key == "flat_slack") cfg.flat_slack_m = std::stod(val);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

PipelineConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    PipelineConfig cfg;
    apply_config_text(cfg, buf.str());
    return cfg;
}

std::string config_to_text(const PipelineConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "pitch = " << cfg.pitch << "\n"
        << "depth_offset = " << cfg.depth_offset << "\n"
        << "spline_spacing = " << cfg.spline_spacing << "\n"
        << "spline_degree = " << cfg.spline_degree << "\n"
        << "spline_lambda = " << cfg.spline_lambda << "\n"
        << "sigma = " << cfg.sigma << "\n"
        << "laplace_window = " << cfg.laplace_window << "\n"
        << "rank_window = " << cfg.rank_window << "\n"
        << "min_ridge_curvature = " << cfg.min_ridge_curvature << "\n"
        << "max_walk_steps = " << cfg.max_walk_steps << "\n"
        << "gravity_tol = " << cfg.gravity_tol_m << "\n"
        << "min_segment_px = " << cfg.min_segment_px << "\n"
        << "max_turn_deg = " << cfg.max_turn_deg << "\n"
        << "junction_window = " << cfg.junction_window << "\n"
        << "junction_votes = " << cfg.junction_votes << "\n"
        << "group_gap_px = " << cfg.group_gap_px << "\n"
        << "group_angle_deg = " << cfg.group_angle_deg << "\n"
        << "group_bridge_px = " << cfg.group_bridge_px << "\n"
        << "group_bridge_angle_deg = " << cfg.group_bridge_angle_deg << "\n"
        << "group_bridge_offset_px = " << cfg.group_bridge_offset_px << "\n"
        << "min_wrinkle_points = " << cfg.min_wrinkle_points << "\n"
        << "hough_rmse_px = " << cfg.hough_rmse_px << "\n"
        << "hough_alpha_deg = " << cfg.hough_alpha_deg << "\n"
        << "hough_bin_alpha_deg = " << cfg.hough_bin_alpha_deg << "\n"
        << "hough_bin_beta_px = " << cfg.hough_bin_beta_px << "\n"
        << "hough_second_peak_ratio = " << cfg.hough_second_peak_ratio << "\n"
        << "max_split_depth = " << cfg.max_split_depth << "\n"
        << "aperture = " << cfg.aperture_m << "\n"
        << "flat_slack = " << cfg.flat_slack_m << "\n";
    return out.str();
}

}  // namespace crease
