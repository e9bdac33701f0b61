#include "emprobe/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace emprobe {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Rejects keys outside `allowed` at the given config path.
void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double number(const json& j, const char* key, double fallback, const std::string& where)
{
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(where + "." + key + " must be a number");
    const double v = j[key].get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + "." + key + " must be finite");
    return v;
}

int integer(const json& j, const char* key, int fallback, const std::string& where, int min_value = 1)
{
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
    const int v = j[key].get<int>();
    if (v < min_value) throw ConfigError(where + "." + key + " must be >= " + std::to_string(min_value));
    return v;
}

Vec3 vec3(const json& j, const char* key, const Vec3& fallback, const std::string& where)
{
    if (!j.contains(key)) return fallback;
    const auto& a = j[key];
    if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() || !a[2].is_number())
        throw ConfigError(where + "." + key + " must be an array of three numbers");
    return Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

std::vector<double> numbers(const json& j, const char* key, const std::string& where)
{
    const auto& a = j[key];
    if (!a.is_array()) throw ConfigError(where + "." + key + " must be an array");
    std::vector<double> out;
    for (const auto& v : a) {
        if (!v.is_number()) throw ConfigError(where + "." + key + " must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

Pulse parse_pulse(const json& j, const std::string& where)
{
    Pulse p;
    if (j.is_null()) return p;
    check_keys(j, where, {"amplitude", "centre", "eta", "lo", "hi"});
    p.amplitude = number(j, "amplitude", p.amplitude, where);
    p.centre = number(j, "centre", p.centre, where);
    p.eta = number(j, "eta", p.eta, where);
    p.lo = number(j, "lo", p.lo, where);
    p.hi = number(j, "hi", p.hi, where);
    if (!(p.eta > 0.0)) throw ConfigError(where + ".eta must be positive");
    if (!(p.lo >= 0.0) || !(p.hi > p.lo)) throw ConfigError(where + " needs 0 <= lo < hi");
    return p;
}

RadialBump parse_bump(const json& j, const std::string& where, double default_radius)
{
    RadialBump b;
    b.amplitude = number(j, "amplitude", 1.0, where);
    b.radius = number(j, "radius", default_radius, where);
    b.sigma = number(j, "sigma", b.radius / 3.5, where);
    b.window_power = integer(j, "window_power", 6, where, 0);
    if (!(b.radius > 0.0)) throw ConfigError(where + ".radius must be positive");
    return b;
}

Vec3 unit_axis(const json& j, const std::string& where)
{
    const Vec3 a = vec3(j, "axis", Vec3::UnitZ(), where);
    if (!(a.norm() > 0.0)) throw ConfigError(where + ".axis must be nonzero");
    return a.normalized();
}

json pulse_json(const Pulse& p)
{
    return {{"amplitude", p.amplitude}, {"centre", p.centre}, {"eta", p.eta}, {"lo", p.lo}, {"hi", p.hi}};
}

json bump_json(const RadialBump& b)
{
    return {{"amplitude", b.amplitude}, {"radius", b.radius}, {"sigma", b.sigma}, {"window_power", b.window_power}};
}

// Source block with every default filled in, so equal sources hash equally.
json normalize_source(const json& spec)
{
    const std::string where = "source";
    if (!spec.is_object() || !spec.contains("family") || !spec["family"].is_string())
        throw ConfigError("source.family must name gaussian_curl, ring_current, separable_x3 or zero");
    const std::string family = spec["family"];
    if (family == "zero") {
        check_keys(spec, where, {"family"});
        return {{"family", "zero"}};
    }
    if (family == "gaussian_curl") {
        check_keys(spec, where, {"family", "amplitude", "radius", "sigma", "window_power", "axis", "pulse"});
        const RadialBump b = parse_bump(spec, where, 0.5);
        const Vec3 a = unit_axis(spec, where);
        json out = bump_json(b);
        out["family"] = family;
        out["axis"] = {a.x(), a.y(), a.z()};
        out["pulse"] = pulse_json(parse_pulse(spec.value("pulse", json()), where + ".pulse"));
        return out;
    }
    if (family == "ring_current") {
        check_keys(spec, where, {"family", "loops"});
        if (!spec.contains("loops") || !spec["loops"].is_array() || spec["loops"].empty())
            throw ConfigError("source.loops must be a nonempty array");
        json loops = json::array();
        for (std::size_t i = 0; i < spec["loops"].size(); ++i) {
            const auto& l = spec["loops"][i];
            const std::string w = where + ".loops[" + std::to_string(i) + "]";
            check_keys(l, w, {"centre", "axis", "amplitude", "radius", "sigma", "window_power", "pulse"});
            json o = bump_json(parse_bump(l, w, 0.3));
            const Vec3 c = vec3(l, "centre", Vec3::Zero(), w);
            const Vec3 a = unit_axis(l, w);
            o["centre"] = {c.x(), c.y(), c.z()};
            o["axis"] = {a.x(), a.y(), a.z()};
            o["pulse"] = pulse_json(parse_pulse(l.value("pulse", json()), w + ".pulse"));
            loops.push_back(o);
        }
        return {{"family", family}, {"loops", loops}};
    }
    if (family == "separable_x3") {
        check_keys(spec, where, {"family", "terms", "axial"});
        if (!spec.contains("terms") || !spec["terms"].is_array() || spec["terms"].empty())
            throw ConfigError("source.terms must be a nonempty array");
        json terms = json::array();
        for (std::size_t i = 0; i < spec["terms"].size(); ++i) {
            const auto& t = spec["terms"][i];
            const std::string w = where + ".terms[" + std::to_string(i) + "]";
            check_keys(t, w, {"centre", "amplitude", "radius", "sigma", "window_power", "pulse"});
            json o = bump_json(parse_bump(t, w, 0.4));
            std::array<double, 2> c{0.0, 0.0};
            if (t.contains("centre")) {
                const auto& a = t["centre"];
                if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
                    throw ConfigError(w + ".centre must be an array of two numbers");
                c = {a[0].get<double>(), a[1].get<double>()};
            }
            o["centre"] = {c[0], c[1]};
            o["pulse"] = pulse_json(parse_pulse(t.value("pulse", json()), w + ".pulse"));
            terms.push_back(o);
        }
        const json axial = spec.value("axial", json::object());
        check_keys(axial, where + ".axial", {"amplitude", "radius", "sigma", "window_power"});
        return {{"family", family}, {"terms", terms}, {"axial", bump_json(parse_bump(axial, where + ".axial", 0.4))}};
    }
    throw ConfigError("unknown source family '" + family + "'");
}

RadialBump bump_from(const json& j)
{
    RadialBump b;
    b.amplitude = j.at("amplitude");
    b.radius = j.at("radius");
    b.sigma = j.at("sigma");
    b.window_power = j.at("window_power");
    return b;
}

Pulse pulse_from(const json& j)
{
    return Pulse{j.at("amplitude"), j.at("centre"), j.at("eta"), j.at("lo"), j.at("hi")};
}

Vec3 vec_from(const json& j) { return Vec3(j.at(0), j.at(1), j.at(2)); }

}  // namespace

SourceModel build_source(const json& spec)
{
    const json s = normalize_source(spec);
    const std::string family = s["family"];
    if (family == "zero") return zero_source();
    if (family == "gaussian_curl") {
        GaussianCurlParams p;
        const RadialBump b = bump_from(s);
        p.amplitude = b.amplitude;
        p.radius = b.radius;
        p.sigma = b.sigma;
        p.window_power = b.window_power;
        p.axis = vec_from(s["axis"]);
        p.pulse = pulse_from(s["pulse"]);
        return gaussian_curl(p);
    }
    if (family == "ring_current") {
        std::vector<CurlBumpTerm> loops;
        for (const auto& l : s["loops"])
            loops.push_back(CurlBumpTerm{bump_from(l), vec_from(l["centre"]), vec_from(l["axis"]), pulse_from(l["pulse"])});
        return ring_current(std::move(loops));
    }
    std::vector<PlanarCurlTerm> terms;
    for (const auto& t : s["terms"])
        terms.push_back(PlanarCurlTerm{bump_from(t), Eigen::Vector2d(t["centre"][0], t["centre"][1]), pulse_from(t["pulse"])});
    return separable_x3(std::move(terms), bump_from(s["axial"]));
}

RunConfig parse_config(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, "config",
               {"problem", "source", "medium", "geometry", "grids", "forward", "bands", "noise", "seed", "output",
                "tolerances", "alpha"});
    RunConfig c;
    try {
        if (j.contains("problem")) {
            if (!j["problem"].is_string()) throw ConfigError("problem must be a string");
            c.problem = problem_from_string(j["problem"]);
        }
        if (!j.contains("source")) throw ConfigError("config needs a source block");
        c.source = normalize_source(j["source"]);

        const json medium = j.value("medium", json::object());
        check_keys(medium, "medium", {"n", "n_values"});
        c.n = number(medium, "n", 1.0, "medium");
        if (!(c.n > 0.0)) throw ConfigError("medium.n must be positive");
        if (medium.contains("n_values")) {
            c.n_values = numbers(medium, "n_values", "medium");
            for (double v : c.n_values)
                if (!(v > 0.0)) throw ConfigError("medium.n_values must be positive");
        }

        const json geom = j.value("geometry", json::object());
        check_keys(geom, "geometry", {"R", "T", "horizon_margin"});
        c.R = number(geom, "R", 1.0, "geometry");
        if (!(c.R > 0.0)) throw ConfigError("geometry.R must be positive");
        if (geom.contains("T")) c.T = number(geom, "T", 0.0, "geometry");
        c.horizon_margin = number(geom, "horizon_margin", 0.5, "geometry");
        if (!(c.horizon_margin > 0.0)) throw ConfigError("geometry.horizon_margin must be positive");

        const json g = j.value("grids", json::object());
        check_keys(g, "grids",
                   {"sphere_polar", "sphere_azimuth", "time", "directions", "radial", "reconstruction", "ip2_polar",
                    "ip2_radial", "ip2_n_count", "ip3_radial", "ip3_angular", "ip3_omega"});
        auto& G = c.grids;
        G.sphere_polar = integer(g, "sphere_polar", G.sphere_polar, "grids");
        G.sphere_azimuth = integer(g, "sphere_azimuth", G.sphere_azimuth, "grids", 2);
        G.time = integer(g, "time", G.time, "grids", 2);
        G.directions = integer(g, "directions", G.directions, "grids");
        G.radial = integer(g, "radial", G.radial, "grids");
        G.reconstruction = integer(g, "reconstruction", G.reconstruction, "grids");
        G.ip2_polar = integer(g, "ip2_polar", G.ip2_polar, "grids");
        G.ip2_radial = integer(g, "ip2_radial", G.ip2_radial, "grids");
        G.ip2_n_count = integer(g, "ip2_n_count", G.ip2_n_count, "grids");
        G.ip3_radial = integer(g, "ip3_radial", G.ip3_radial, "grids");
        G.ip3_angular = integer(g, "ip3_angular", G.ip3_angular, "grids");
        G.ip3_omega = integer(g, "ip3_omega", G.ip3_omega, "grids");
        if (G.sphere_azimuth % 2) throw ConfigError("grids.sphere_azimuth must be even");

        const json f = j.value("forward", json::object());
        check_keys(f, "forward", {"cap_polar", "cap_azimuth", "rho_min", "rho_density"});
        c.forward.cap_polar = integer(f, "cap_polar", c.forward.cap_polar, "forward");
        c.forward.cap_azimuth = integer(f, "cap_azimuth", c.forward.cap_azimuth, "forward", 0);
        c.forward.rho_min = integer(f, "rho_min", c.forward.rho_min, "forward");
        c.forward.rho_density = number(f, "rho_density", c.forward.rho_density, "forward");

        if (j.contains("bands")) c.bands = numbers(j, "bands", "config");
        if (c.bands.empty()) throw ConfigError("bands must not be empty");
        for (double b : c.bands)
            if (!(b > 1.0)) throw ConfigError("every band b must exceed 1");
        if (j.contains("noise")) c.noise = numbers(j, "noise", "config");
        if (c.noise.empty()) throw ConfigError("noise must not be empty (use [0] for noiseless)");
        for (double e : c.noise)
            if (!(e >= 0.0) || !(e < std::exp(-1.0))) throw ConfigError("noise levels must lie in [0, 1/e)");

        if (j.contains("seed")) {
            if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
                throw ConfigError("seed must be a nonnegative integer");
            c.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("output")) {
            if (!j["output"].is_string()) throw ConfigError("output must be a string");
            c.output = j["output"];
        }
        const json t = j.value("tolerances", json::object());
        check_keys(t, "tolerances", {"delta_min", "huygens", "lemma_corruption"});
        c.tolerances.delta_min = number(t, "delta_min", c.tolerances.delta_min, "tolerances");
        c.tolerances.huygens = number(t, "huygens", c.tolerances.huygens, "tolerances");
        c.tolerances.lemma_corruption = number(t, "lemma_corruption", c.tolerances.lemma_corruption, "tolerances");
        c.alpha = number(j, "alpha", c.alpha, "config");
        if (!(c.alpha > 0.0) || !(c.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config value has the wrong type: ") + e.what());
    }

    const SourceModel source = build_source(c.source);
    if (source.support_radius() > c.R) throw ConfigError("source support radius exceeds geometry.R");
    if (c.problem == ProblemKind::IP3 && source.kind != SourceKind::IP3_x3_separable && !source.is_zero())
        throw ConfigError("IP3 runs need the separable_x3 source family");
    if (c.problem != ProblemKind::IP3 && source.kind == SourceKind::IP3_x3_separable)
        throw ConfigError("the separable_x3 family is for IP3 runs");
    if (c.problem == ProblemKind::IP1 && source.kind == SourceKind::IP2_general)
        throw ConfigError("IP1 runs need a source with one shared time profile");
    for (double n : config_n_grid(c)) (void)measurement_horizon(c, source, n);

    json canon = {{"problem", to_string(c.problem)},
                  {"source", c.source},
                  {"medium", {{"n", c.n}, {"n_values", c.n_values}}},
                  {"geometry", {{"R", c.R}, {"horizon_margin", c.horizon_margin}}},
                  {"grids",
                   {{"sphere_polar", c.grids.sphere_polar},
                    {"sphere_azimuth", c.grids.sphere_azimuth},
                    {"time", c.grids.time},
                    {"directions", c.grids.directions},
                    {"radial", c.grids.radial},
                    {"reconstruction", c.grids.reconstruction},
                    {"ip2_polar", c.grids.ip2_polar},
                    {"ip2_radial", c.grids.ip2_radial},
                    {"ip2_n_count", c.grids.ip2_n_count},
                    {"ip3_radial", c.grids.ip3_radial},
                    {"ip3_angular", c.grids.ip3_angular},
                    {"ip3_omega", c.grids.ip3_omega}}},
                  {"forward",
                   {{"cap_polar", c.forward.cap_polar},
                    {"cap_azimuth", c.forward.cap_azimuth},
                    {"rho_min", c.forward.rho_min},
                    {"rho_density", c.forward.rho_density}}},
                  {"bands", c.bands},
                  {"noise", c.noise},
                  {"seed", c.seed},
                  {"tolerances",
                   {{"delta_min", c.tolerances.delta_min},
                    {"huygens", c.tolerances.huygens},
                    {"lemma_corruption", c.tolerances.lemma_corruption}}},
                  {"alpha", c.alpha}};
    if (c.T) canon["geometry"]["T"] = *c.T;
    c.canonical = canon.dump();
    return c;
}

RunConfig load_config(const fs::path& path)
{
    std::string text;
    try {
        text = read_text(path);
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text);
}

double measurement_horizon(const RunConfig& config, const SourceModel& source, double n)
{
    const double horizon = huygens_horizon(source, make_medium(n), config.R);
    if (config.T) {
        if (!(*config.T > horizon))
            throw ConfigError("geometry.T = " + std::to_string(*config.T) + " must exceed T0 + 2 sqrt(n) R = " +
                              std::to_string(horizon) + " for n = " + std::to_string(n));
        return *config.T;
    }
    return horizon + config.horizon_margin;
}

std::vector<double> config_n_grid(const RunConfig& config)
{
    if (config.problem != ProblemKind::IP2) return {config.n};
    if (!config.n_values.empty()) return config.n_values;
    return ip2_n_grid(*std::max_element(config.bands.begin(), config.bands.end()), config.grids.ip2_n_count);
}

}  // namespace emprobe
