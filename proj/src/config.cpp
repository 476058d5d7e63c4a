#include "matteforge/config.hpp"

#include <charconv>
#include <sstream>

#include "matteforge/error.hpp"

namespace matteforge {

namespace {

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double v = std::stod(value, &used);
        if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidArgument, "'" + key + "' expects a number, got '" + value + "'");
}

int parse_int(const std::string& key, const std::string& value) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw Error(ErrorCode::InvalidArgument, "'" + key + "' expects an integer, got '" + value + "'");
    }
    return v;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_int(key, trim(item)));
    if (out.empty()) throw Error(ErrorCode::InvalidArgument, "'" + key + "' expects a comma separated list");
    return out;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "ms-spatial-bandwidth",   "ms-range-bandwidth",       "ms-min-area",          "ms-max-iters",
        "ms-convergence-eps",     "fg-seed-outside-fraction", "fg-min-patches",       "fg-fragment-area-fraction",
        "factors",                "trimap-band-scale",        "matting-window-radius", "matting-epsilon",
        "matting-lambda",         "matting-solver-tol",       "matting-solver-max-iters",
    };
    return keys;
}

std::vector<Setting> parse_config_text(std::string_view text) {
    std::vector<Setting> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::InvalidArgument, "config line " + std::to_string(line_no) + ": expected key = value");
        }
        out.emplace_back(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
    }
    return out;
}

void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "ms-spatial-bandwidth") cfg.mean_shift.spatial_bandwidth = parse_double(key, value);
    else if (key == "ms-range-bandwidth") cfg.mean_shift.range_bandwidth = parse_double(key, value);
    else if (key == "ms-min-area") cfg.mean_shift.min_area = parse_int(key, value);
    else if (key == "ms-max-iters") cfg.mean_shift.max_iters = parse_int(key, value);
    else if (key == "ms-convergence-eps") cfg.mean_shift.convergence_eps = parse_double(key, value);
    else if (key == "fg-seed-outside-fraction") cfg.figure_ground.seed_outside_fraction = parse_double(key, value);
    else if (key == "fg-min-patches") cfg.figure_ground.min_patches = parse_int(key, value);
    else if (key == "fg-fragment-area-fraction") cfg.figure_ground.fragment_area_fraction = parse_double(key, value);
    else if (key == "factors") cfg.multires.factors = parse_int_list(key, value);
    else if (key == "trimap-band-scale") cfg.trimap.band_scale = parse_double(key, value);
    else if (key == "matting-window-radius") cfg.matting.window_radius = parse_int(key, value);
    else if (key == "matting-epsilon") cfg.matting.epsilon = parse_double(key, value);
    else if (key == "matting-lambda") cfg.matting.lambda = parse_double(key, value);
    else if (key == "matting-solver-tol") cfg.matting.solver_tol = parse_double(key, value);
    else if (key == "matting-solver-max-iters") cfg.matting.solver_max_iters = parse_int(key, value);
    else throw Error(ErrorCode::InvalidArgument, "unknown configuration key '" + key + "'");
}

std::vector<Setting> describe(const PipelineConfig& cfg) {
    std::string factors;
    for (size_t i = 0; i < cfg.multires.factors.size(); ++i) {
        if (i) factors += ",";
        factors += std::to_string(cfg.multires.factors[i]);
    }
    return {
        {"ms-spatial-bandwidth", format_double(cfg.mean_shift.spatial_bandwidth)},
        {"ms-range-bandwidth", format_double(cfg.mean_shift.range_bandwidth)},
        {"ms-min-area", std::to_string(cfg.mean_shift.min_area)},
        {"ms-max-iters", std::to_string(cfg.mean_shift.max_iters)},
        {"ms-convergence-eps", format_double(cfg.mean_shift.convergence_eps)},
        {"fg-seed-outside-fraction", format_double(cfg.figure_ground.seed_outside_fraction)},
        {"fg-min-patches", std::to_string(cfg.figure_ground.min_patches)},
        {"fg-fragment-area-fraction", format_double(cfg.figure_ground.fragment_area_fraction)},
        {"factors", factors},
        {"trimap-band-scale", format_double(cfg.trimap.band_scale)},
        {"matting-window-radius", std::to_string(cfg.matting.window_radius)},
        {"matting-epsilon", format_double(cfg.matting.epsilon)},
        {"matting-lambda", format_double(cfg.matting.lambda)},
        {"matting-solver-tol", format_double(cfg.matting.solver_tol)},
        {"matting-solver-max-iters", std::to_string(cfg.matting.solver_max_iters)},
    };
}

std::string render_config_text(const PipelineConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : describe(cfg)) out += k + " = " + v + "\n";
    return out;
}

}  // namespace matteforge
