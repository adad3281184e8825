// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "hmbsynth/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <toml.hpp>

namespace hmbsynth {

namespace {

using Severity = Diagnostic::Severity;
using LineMap = std::map<std::string, int>;

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

int line_of(const toml::node& node) {
    return static_cast<int>(node.source().begin.line);
}

// Reads a TOML document into PipelineConfig, recording type errors, unknown
// keys and the line each key came from.
class Reader {
public:
    Reader(std::vector<Diagnostic>& diags, LineMap& lines) : diags_(diags), lines_(lines) {}

    void read(const toml::table& root, PipelineConfig& cfg) {
        allow(root, "", {"seed", "output_size", "final_filter", "output_dir", "branch_probs", "part_groups", "legend",
                         "trajectory", "morph", "hmb", "first_order", "second_order"});
        if (auto n = integer(root, "", "seed")) {
            if (*n < 0) error(root.get("seed"), "seed", "must be a nonnegative integer");
            else cfg.root_seed = static_cast<std::uint64_t>(*n);
        }
        if (auto n = integer(root, "", "output_size")) cfg.output_size = static_cast<int>(*n);
        if (auto s = string(root, "", "final_filter")) filter_name(root.get("final_filter"), "final_filter", *s, cfg.final_filter);
        if (auto s = string(root, "", "output_dir")) cfg.output_dir = *s;

        if (auto* t = table(root, "", "branch_probs")) {
            allow(*t, "branch_probs", {"none", "hmb", "generic"});
            number(*t, "branch_probs", "none", cfg.branch_probs.none);
            number(*t, "branch_probs", "hmb", cfg.branch_probs.hmb);
            number(*t, "branch_probs", "generic", cfg.branch_probs.generic);
        }
        if (auto* t = table(root, "", "part_groups")) {
            std::set<std::string> names;
            for (PartGroup g : kAllPartGroups) names.insert(to_string(g));
            allow(*t, "part_groups", names);
            for (int i = 0; i < kNumPartGroups; ++i) {
                number(*t, "part_groups", to_string(kAllPartGroups[i]), cfg.part_group_weights[i]);
            }
        }
        if (auto* t = table(root, "", "legend")) {
            cfg.legend.clear();
            for (const auto& [k, v] : *t) {
                const std::string key(k.str());
                const std::string path = join("legend", key);
                lines_[path] = line_of(v);
                int code = -1;
                try {
                    std::size_t used = 0;
                    code = std::stoi(key, &used);
                    if (used != key.size()) code = -1;
                } catch (const std::exception&) {
                    code = -1;
                }
                if (code < 1 || code > 255) {
                    error(&v, path, "legend keys must be label codes 1..255");
                    continue;
                }
                if (!v.is_string()) {
                    error(&v, path, "legend values must be part names");
                    continue;
                }
                cfg.legend[code] = *v.value<std::string>();
            }
            lines_["legend"] = line_of(*t);
        }
        if (auto* t = table(root, "", "trajectory")) {
            const std::string p = "trajectory";
            allow(*t, p, {"num_steps", "canvas", "max_step_length", "inertia", "perturbation_sigma", "big_shake_prob",
                          "centripetal_gain", "exposure_fraction", "psf_size"});
            auto& tr = cfg.trajectory;
            if (auto n = integer(*t, p, "num_steps")) tr.base.num_steps = static_cast<int>(*n);
            if (auto n = integer(*t, p, "canvas")) tr.base.canvas = static_cast<int>(*n);
            range(*t, p, "max_step_length", tr.max_step_length);
            number(*t, p, "inertia", tr.base.inertia);
            number(*t, p, "perturbation_sigma", tr.base.perturbation_sigma);
            number(*t, p, "big_shake_prob", tr.base.big_shake_prob);
            number(*t, p, "centripetal_gain", tr.base.centripetal_gain);
            number(*t, p, "exposure_fraction", tr.exposure_fraction);
            if (auto n = integer(*t, p, "psf_size")) tr.psf_size = static_cast<int>(*n);
        }
        if (auto* t = table(root, "", "morph")) {
            const std::string p = "morph";
            allow(*t, p, {"erode_radius", "dilate_radius", "gaussian_sigma", "binarize_threshold"});
            int_range(*t, p, "erode_radius", cfg.morph.erode_radius);
            int_range(*t, p, "dilate_radius", cfg.morph.dilate_radius);
            range(*t, p, "gaussian_sigma", cfg.morph.gaussian_sigma);
            number(*t, p, "binarize_threshold", cfg.morph.binarize_threshold);
        }
        if (auto* t = table(root, "", "hmb")) {
            allow(*t, "hmb", {"border"});
            if (auto s = string(*t, "hmb", "border")) {
                if (*s == "circular") cfg.hmb_border = BorderMode::Circular;
                else if (*s == "reflect") cfg.hmb_border = BorderMode::Reflect;
                else error(t->get("border"), "hmb.border", "must be \"circular\" or \"reflect\"");
            }
        }
        if (auto* t = table(root, "", "first_order")) generic(*t, "first_order", cfg.first_order);
        if (auto* t = table(root, "", "second_order")) generic(*t, "second_order", cfg.second_order);
    }

private:
    void error(const toml::node* node, const std::string& key, const std::string& msg) {
        diags_.push_back({Severity::Error, node ? line_of(*node) : 0, key, msg});
    }

    void allow(const toml::table& t, const std::string& prefix, const std::set<std::string>& names) {
        for (const auto& [k, v] : t) {
            const std::string key(k.str());
            if (!names.contains(key)) {
                diags_.push_back({Severity::Warning, line_of(v), join(prefix, key), "unknown key ignored"});
            }
        }
    }

    const toml::node* find(const toml::table& t, const std::string& prefix, const std::string& key) {
        const toml::node* n = t.get(key);
        if (n) lines_[join(prefix, key)] = line_of(*n);
        return n;
    }

    const toml::table* table(const toml::table& t, const std::string& prefix, const std::string& key) {
        const toml::node* n = find(t, prefix, key);
        if (!n) return nullptr;
        if (!n->is_table()) {
            error(n, join(prefix, key), "expected a table");
            return nullptr;
        }
        return n->as_table();
    }

    std::optional<std::int64_t> integer(const toml::table& t, const std::string& prefix, const std::string& key) {
        const toml::node* n = find(t, prefix, key);
        if (!n) return std::nullopt;
        if (!n->is_integer()) {
            error(n, join(prefix, key), "expected an integer");
            return std::nullopt;
        }
        return n->value<std::int64_t>();
    }

    void number(const toml::table& t, const std::string& prefix, const std::string& key, double& out) {
        const toml::node* n = find(t, prefix, key);
        if (!n) return;
        if (!n->is_number()) {
            error(n, join(prefix, key), "expected a number");
            return;
        }
        out = *n->value<double>();
    }

    std::optional<std::string> string(const toml::table& t, const std::string& prefix, const std::string& key) {
        const toml::node* n = find(t, prefix, key);
        if (!n) return std::nullopt;
        if (!n->is_string()) {
            error(n, join(prefix, key), "expected a string");
            return std::nullopt;
        }
        return n->value<std::string>();
    }

    const toml::array* pair_array(const toml::table& t, const std::string& prefix, const std::string& key) {
        const toml::node* n = find(t, prefix, key);
        if (!n) return nullptr;
        const toml::array* a = n->as_array();
        if (!a || a->size() != 2) {
            error(n, join(prefix, key), "expected a two-element [lo, hi] array");
            return nullptr;
        }
        return a;
    }

    void range(const toml::table& t, const std::string& prefix, const std::string& key, Range& out) {
        const toml::array* a = pair_array(t, prefix, key);
        if (!a) return;
        if (!(*a)[0].is_number() || !(*a)[1].is_number()) {
            error(t.get(key), join(prefix, key), "range bounds must be numbers");
            return;
        }
        out = {*(*a)[0].value<double>(), *(*a)[1].value<double>()};
    }

    void int_range(const toml::table& t, const std::string& prefix, const std::string& key, IntRange& out) {
        const toml::array* a = pair_array(t, prefix, key);
        if (!a) return;
        if (!(*a)[0].is_integer() || !(*a)[1].is_integer()) {
            error(t.get(key), join(prefix, key), "range bounds must be integers");
            return;
        }
        out = {static_cast<int>(*(*a)[0].value<std::int64_t>()), static_cast<int>(*(*a)[1].value<std::int64_t>())};
    }

    void filter_name(const toml::node* node, const std::string& key, const std::string& name, ResizeFilter& out) {
        try {
            out = resize_filter_from_string(name);
        } catch (const Error&) {
            error(node, key, "unknown filter \"" + name + "\" (area, bilinear, bicubic)");
        }
    }

    void generic(const toml::table& t, const std::string& p, GenericParams& g) {
        allow(t, p, {"blur", "resize", "noise", "jpeg"});
        if (auto* b = table(t, p, "blur")) {
            const std::string q = join(p, "blur");
            allow(*b, q, {"kernel_size", "sigma", "rotation", "isotropic_prob", "skip_prob"});
            IntRange ks{g.blur.kernel_size_min, g.blur.kernel_size_max};
            int_range(*b, q, "kernel_size", ks);
            g.blur.kernel_size_min = ks.lo;
            g.blur.kernel_size_max = ks.hi;
            range(*b, q, "sigma", g.blur.sigma);
            range(*b, q, "rotation", g.blur.rotation);
            number(*b, q, "isotropic_prob", g.blur.isotropic_prob);
            number(*b, q, "skip_prob", g.blur.skip_prob);
        }
        if (auto* r = table(t, p, "resize")) {
            const std::string q = join(p, "resize");
            allow(*r, q, {"scale", "filters", "skip_prob"});
            range(*r, q, "scale", g.resize.scale);
            number(*r, q, "skip_prob", g.resize.skip_prob);
            if (const toml::node* n = find(*r, q, "filters")) {
                const toml::array* a = n->as_array();
                if (!a) {
                    error(n, join(q, "filters"), "expected an array of filter names");
                } else {
                    g.resize.filters.clear();
                    for (const auto& item : *a) {
                        if (!item.is_string()) {
                            error(&item, join(q, "filters"), "filter names must be strings");
                            continue;
                        }
                        ResizeFilter f{};
                        const auto before = diags_.size();
                        filter_name(&item, join(q, "filters"), *item.value<std::string>(), f);
                        if (diags_.size() == before) g.resize.filters.push_back(f);
                    }
                }
            }
        }
        if (auto* nz = table(t, p, "noise")) {
            const std::string q = join(p, "noise");
            allow(*nz, q, {"gaussian_sigma", "poisson_scale", "gaussian_prob", "skip_prob"});
            range(*nz, q, "gaussian_sigma", g.noise.gaussian_sigma);
            range(*nz, q, "poisson_scale", g.noise.poisson_scale);
            number(*nz, q, "gaussian_prob", g.noise.gaussian_prob);
            number(*nz, q, "skip_prob", g.noise.skip_prob);
        }
        if (auto* j = table(t, p, "jpeg")) {
            const std::string q = join(p, "jpeg");
            allow(*j, q, {"quality", "skip_prob"});
            IntRange qr{g.jpeg.quality_min, g.jpeg.quality_max};
            int_range(*j, q, "quality", qr);
            g.jpeg.quality_min = qr.lo;
            g.jpeg.quality_max = qr.hi;
            number(*j, q, "skip_prob", g.jpeg.skip_prob);
        }
    }

    std::vector<Diagnostic>& diags_;
    LineMap& lines_;
};

// Semantic checks shared by file parsing and programmatic configs.
class Checker {
public:
    Checker(std::vector<Diagnostic>& diags, const LineMap& lines) : diags_(diags), lines_(lines) {}

    void check(const PipelineConfig& c) {
        const auto& b = c.branch_probs;
        prob("branch_probs.none", b.none);
        prob("branch_probs.hmb", b.hmb);
        prob("branch_probs.generic", b.generic);
        const double sum = b.none + b.hmb + b.generic;
        if (std::fabs(sum - 1.0) > 1e-9) {
            error("branch_probs", "branch probabilities sum to " + fmt(sum) + ", expected 1");
        }

        double wsum = 0.0;
        for (int i = 0; i < kNumPartGroups; ++i) {
            const double w = c.part_group_weights[i];
            if (!(w >= 0.0) || !std::isfinite(w)) error("part_groups." + to_string(kAllPartGroups[i]), "weight must be >= 0");
            wsum += w;
        }
        if (!(wsum > 0.0)) error("part_groups", "at least one part group weight must be positive");

        try {
            validate_legend(c.legend);
        } catch (const Error& e) {
            error("legend", e.what());
        }

        const auto& t = c.trajectory;
        if (t.base.num_steps < 2) error("trajectory.num_steps", "must be >= 2");
        if (t.base.canvas < 8) error("trajectory.canvas", "must be >= 8");
        if (!(t.base.inertia >= 0.0 && t.base.inertia <= 1.0)) error("trajectory.inertia", "must lie in [0,1]");
        nonneg("trajectory.perturbation_sigma", t.base.perturbation_sigma);
        prob("trajectory.big_shake_prob", t.base.big_shake_prob);
        nonneg("trajectory.centripetal_gain", t.base.centripetal_gain);
        ordered("trajectory.max_step_length", t.max_step_length, 0.0, 1e6);
        if (!(t.exposure_fraction > 0.0 && t.exposure_fraction <= 1.0)) {
            error("trajectory.exposure_fraction", "must lie in (0,1]");
        }
        if (t.psf_size < 3 || t.psf_size % 2 == 0) error("trajectory.psf_size", "must be odd and >= 3");

        const auto& m = c.morph;
        int_ordered("morph.erode_radius", m.erode_radius, 0, 64);
        int_ordered("morph.dilate_radius", m.dilate_radius, 0, 64);
        ordered("morph.gaussian_sigma", m.gaussian_sigma, 0.0, 64.0);
        if (!(m.binarize_threshold > 0.0 && m.binarize_threshold < 1.0)) {
            error("morph.binarize_threshold", "must lie in (0,1)");
        }

        generic("first_order", c.first_order);
        generic("second_order", c.second_order);

        if (c.output_size != 0 && c.output_size < kMinPipelineSide) {
            error("output_size", "must be 0 (keep HQ size) or >= " + std::to_string(kMinPipelineSide));
        }
    }

private:
    static std::string fmt(double v) {
        std::ostringstream os;
        os.precision(12);
        os << v;
        return os.str();
    }

    int line(const std::string& key) const {
        for (std::string k = key;;) {
            if (auto it = lines_.find(k); it != lines_.end()) return it->second;
            const auto dot = k.rfind('.');
            if (dot == std::string::npos) return 0;
            k.resize(dot);
        }
    }

    void error(const std::string& key, const std::string& msg) {
        diags_.push_back({Severity::Error, line(key), key, msg});
    }

    void prob(const std::string& key, double p) {
        if (!(p >= 0.0 && p <= 1.0)) error(key, "probability must lie in [0,1]");
    }

    void nonneg(const std::string& key, double v) {
        if (!(v >= 0.0) || !std::isfinite(v)) error(key, "must be >= 0");
    }

    void ordered(const std::string& key, const Range& r, double lo, double hi) {
        if (!(r.lo >= lo && r.lo <= r.hi && r.hi <= hi)) {
            error(key, "range must satisfy " + fmt(lo) + " <= lo <= hi <= " + fmt(hi));
        }
    }

    void int_ordered(const std::string& key, const IntRange& r, int lo, int hi) {
        if (!(r.lo >= lo && r.lo <= r.hi && r.hi <= hi)) {
            error(key, "range must satisfy " + std::to_string(lo) + " <= lo <= hi <= " + std::to_string(hi));
        }
    }

    void generic(const std::string& p, const GenericParams& g) {
        const auto& b = g.blur;
        if (b.kernel_size_min < 3 || b.kernel_size_min > b.kernel_size_max || b.kernel_size_max > 63 ||
            b.kernel_size_min % 2 == 0 || b.kernel_size_max % 2 == 0) {
            error(p + ".blur.kernel_size", "bounds must be odd with 3 <= lo <= hi <= 63");
        }
        ordered(p + ".blur.sigma", b.sigma, 1e-3, 64.0);
        ordered(p + ".blur.rotation", b.rotation, -10.0, 10.0);
        prob(p + ".blur.isotropic_prob", b.isotropic_prob);
        prob(p + ".blur.skip_prob", b.skip_prob);
        ordered(p + ".resize.scale", g.resize.scale, 1e-2, 4.0);
        if (g.resize.scale.lo <= 0.0) error(p + ".resize.scale", "scale must be positive");
        if (g.resize.filters.empty()) error(p + ".resize.filters", "at least one filter required");
        prob(p + ".resize.skip_prob", g.resize.skip_prob);
        ordered(p + ".noise.gaussian_sigma", g.noise.gaussian_sigma, 0.0, 1.0);
        ordered(p + ".noise.poisson_scale", g.noise.poisson_scale, 1e-3, 100.0);
        prob(p + ".noise.gaussian_prob", g.noise.gaussian_prob);
        prob(p + ".noise.skip_prob", g.noise.skip_prob);
        if (g.jpeg.quality_min < 30 || g.jpeg.quality_min > g.jpeg.quality_max || g.jpeg.quality_max > 100) {
            error(p + ".jpeg.quality", "range must satisfy 30 <= lo <= hi <= 100");
        }
        prob(p + ".jpeg.skip_prob", g.jpeg.skip_prob);
    }

    std::vector<Diagnostic>& diags_;
    const LineMap& lines_;
};

std::string summarize(const std::vector<Diagnostic>& diags) {
    std::string msg;
    for (const auto& d : diags) {
        if (d.severity != Severity::Error) continue;
        if (!msg.empty()) msg += "; ";
        msg += d.format();
    }
    return msg;
}

std::vector<Diagnostic> parse_into(std::string_view text, std::string_view source, PipelineConfig& cfg) {
    std::vector<Diagnostic> diags;
    LineMap lines;
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        diags.push_back({Severity::Error, static_cast<int>(e.source().begin.line), "",
                         "TOML syntax error: " + std::string(e.description())});
        return diags;
    }
    Reader(diags, lines).read(root, cfg);
    Checker(diags, lines).check(cfg);
    return diags;
}

}  // namespace

std::string Diagnostic::format(std::string_view source) const {
    std::ostringstream os;
    if (!source.empty()) os << source << ":";
    if (line > 0) os << line << ": ";
    else if (!source.empty()) os << " ";
    os << (severity == Severity::Error ? "error" : "warning");
    if (!key.empty()) os << " [" << key << "]";
    os << ": " << message;
    return os.str();
}

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : Error(ErrorCode::ConfigError, summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    for (const auto& d : diagnostics) {
        if (d.severity == Severity::Error) return true;
    }
    return false;
}

void PipelineConfig::validate() const {
    std::vector<Diagnostic> diags;
    const LineMap none;
    Checker(diags, none).check(*this);
    if (has_errors(diags)) throw ConfigError(std::move(diags));
}

std::vector<Diagnostic> validate_config_text(std::string_view text, std::string_view source) {
    PipelineConfig cfg;
    return parse_into(text, source, cfg);
}

std::vector<Diagnostic> validate_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return {{Severity::Error, 0, "", "cannot read '" + path.string() + "'"}};
    std::stringstream ss;
    ss << in.rdbuf();
    return validate_config_text(ss.str(), path.string());
}

PipelineConfig parse_config(std::string_view text, std::string_view source) {
    PipelineConfig cfg;
    auto diags = parse_into(text, source, cfg);
    if (has_errors(diags)) throw ConfigError(std::move(diags));
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({{Severity::Error, 0, "", "cannot read '" + path.string() + "'"}});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string default_config_text() {
    return R"(# hmbsynth pipeline configuration
seed = 0
output_size = 512
final_filter = "bicubic"

[branch_probs]
none = 0.2
hmb = 0.4
generic = 0.4

[part_groups]
head = 1.0
left_upper_limb = 1.0
right_upper_limb = 1.0
left_lower_limb = 1.0
right_lower_limb = 1.0
whole_body = 1.0

[legend]
1 = "head"
2 = "torso"
3 = "left_upper_limb"
4 = "right_upper_limb"
5 = "left_lower_limb"
6 = "right_lower_limb"

[trajectory]
num_steps = 256
canvas = 64
max_step_length = [2.0, 16.0]
inertia = 0.7
perturbation_sigma = 0.3
big_shake_prob = 0.2
centripetal_gain = 0.7
exposure_fraction = 1.0
psf_size = 65

[morph]
erode_radius = [0, 2]
dilate_radius = [2, 8]
gaussian_sigma = [1.0, 6.0]
binarize_threshold = 0.5

[hmb]
border = "circular"

[first_order.blur]
kernel_size = [7, 21]
sigma = [0.2, 3.0]
rotation = [0.0, 3.141592653589793]
isotropic_prob = 0.5
skip_prob = 0.0

[first_order.resize]
scale = [0.25, 1.5]
filters = ["area", "bilinear", "bicubic"]
skip_prob = 0.0

[first_order.noise]
gaussian_sigma = [0.004, 0.06]
poisson_scale = [0.05, 2.0]
gaussian_prob = 0.5
skip_prob = 0.0

[first_order.jpeg]
quality = [30, 95]
skip_prob = 0.0

[second_order.blur]
kernel_size = [7, 21]
sigma = [0.2, 3.0]
rotation = [0.0, 3.141592653589793]
isotropic_prob = 0.5
skip_prob = 0.0

[second_order.resize]
scale = [0.25, 1.5]
filters = ["area", "bilinear", "bicubic"]
skip_prob = 0.0

[second_order.noise]
gaussian_sigma = [0.004, 0.06]
poisson_scale = [0.05, 2.0]
gaussian_prob = 0.5
skip_prob = 0.0

[second_order.jpeg]
quality = [30, 95]
skip_prob = 0.0
)";
}

}  // namespace hmbsynth
