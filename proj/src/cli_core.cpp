#include "uwoc/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "uwoc/errors.hpp"
#include "uwoc/meijerg.hpp"
#include "uwoc/montecarlo.hpp"

namespace uwoc {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* const kFigureNames[] = {
    "op_vs_snr",       "op_combining",   "op_configs_mc",
    "ber_vs_snr",      "ber_vs_length",  "ber_vs_placement",
    "soc_vs_snr",      "do_vs_snr",      "capacity_vs_snr",
    "surface_3d",      "pon_delay_throughput",
    "total_capacity_switching",
};
constexpr int kFigureCount = 12;

}  // namespace

Figure figure_from_name(const std::string& name) {
    for (int i = 0; i < kFigureCount; ++i) {
        if (name == kFigureNames[i]) return static_cast<Figure>(i);
    }
    throw ConfigError("figure: unknown name '" + name + "'");
}

std::string figure_name(Figure figure) {
    return kFigureNames[static_cast<int>(figure)];
}

std::vector<std::string> figure_names() {
    return {kFigureNames, kFigureNames + kFigureCount};
}

std::vector<double> AxisSpec::values() const {
    std::vector<double> out(static_cast<std::size_t>(points));
    const double n1 = static_cast<double>(points - 1);
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / n1;
        out[static_cast<std::size_t>(i)] =
            log_scale ? start * std::pow(stop / start, t)
                      : start + (stop - start) * t;
    }
    return out;
}

std::string format_csv_value(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

int resolve_threads(int requested) {
    int capped = std::max(1, requested);
    if (const char* env = std::getenv("UWOC_MAX_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) {
            capped = std::min(capped, static_cast<int>(cap));
        }
    }
    return capped;
}

// ---------------------------------------------------------------------------
// Config document: defaults, merge, validation

namespace {

json axis_to_json(const AxisSpec& a) {
    return {{"start", a.start},
            {"stop", a.stop},
            {"points", a.points},
            {"scale", a.log_scale ? "log" : "lin"}};
}

json default_document() {
    const RunConfig d;
    json j;
    j["figure"] = "op_vs_snr";
    j["seed"] = 1;
    j["threads"] = 1;
    j["axis"] = axis_to_json(AxisSpec{});
    j["axis2"] = axis_to_json(AxisSpec{4.0, 64.0, 5, true});
    j["snr"] = {{"gamma_th_db", d.gamma_th_db},
                {"p_t_db", d.p_t_db},
                {"sigma_n2_oris_dbm", d.sigma_n2_oris_dbm},
                {"sigma_n2_direct_dbm", d.sigma_n2_direct_dbm}};
    j["geometry"] = {{"l_sr", d.geometry.l_sr},
                     {"l_rd", d.geometry.l_rd},
                     {"l_d", d.geometry.l_d},
                     {"c_att", d.geometry.c_att},
                     {"water", ""}};
    j["beam"] = {{"wavelength_nm", d.wavelength * 1e9},
                 {"w0", d.w0},
                 {"d_r", d.d_r}};
    j["pointing"] = {{"sigma_theta", d.sigma_theta},
                     {"sigma_phi", d.sigma_phi},
                     {"sigma_disp", d.sigma_disp},
                     {"sigma_theta_series", json::array()},
                     {"sigma_phi_series", json::array()}};
    j["turbulence"] = {{"mode", "otops"},
                       {"alpha_direct", d.alpha_direct_fixed},
                       {"alpha_hop", d.alpha_hop_fixed},
                       {"beta_hop", d.beta_hop_fixed},
                       {"t_mean", d.env.t_mean},
                       {"s_a", d.env.s_a},
                       {"pressure", d.env.pressure},
                       {"h", d.env.h},
                       {"epsilon1", d.epsilon1},
                       {"epsilon2", d.epsilon2},
                       {"chi_t", d.env.chi_t},
                       {"nu", d.env.nu},
                       {"omega", d.omega}};
    j["oris"] = {{"n_elements", d.n_elements},
                 {"n_list", d.n_list},
                 {"quantizer_bits", d.quantizer_bits},
                 {"sigma_phase", d.sigma_phase},
                 {"active_gain_db", d.active_gain_db},
                 {"active_sigma_phase", d.active_sigma_phase},
                 {"active_p_noise_dbw", d.active_p_noise_dbw}};
    j["modulations"] = d.modulations;
    j["detection"] = "hd";
    j["mc"] = {{"trials", d.mc_trials}};
    j["uoap"] = {{"u", d.u_links},
                 {"v", d.v_links},
                 {"t_nodes", d.t_nodes},
                 {"c_th", d.c_th}};
    const PONConfig& p = d.pon;
    j["pon"] = {{"r_up_branch", p.r_up_branch},
                {"r_up_total", p.r_up_total},
                {"fiber_km", p.fiber_km},
                {"t_prop_per_km", p.t_prop_per_km},
                {"t_fec", p.t_fec},
                {"t_proc", p.t_proc},
                {"t_base", p.t_base},
                {"t_report", p.t_report},
                {"t_grant", p.t_grant},
                {"t_guard", p.t_guard},
                {"t_service", p.t_service},
                {"k_proc", p.k_proc},
                {"alpha_powerlaw", p.alpha_powerlaw},
                {"eta", p.eta},
                {"c_max", p.c_max},
                {"alpha_zipf", p.alpha_zipf},
                {"overload_factor", p.overload_factor},
                {"t_queue_base", p.t_queue_base},
                {"k_load", p.k_load},
                {"queue_noise_std", p.queue_noise_std},
                {"noise_seed", d.pon_noise_seed}};
    return j;
}

// Overlays user values on the defaults; unknown keys and type mismatches are
// reported with their full path. Arrays replace the default wholesale.
void merge_into(json& dst, const json& src, const std::string& path,
                std::vector<std::string>& errors) {
    for (const auto& [key, value] : src.items()) {
        const std::string where = path.empty() ? key : path + "." + key;
        if (!dst.contains(key)) {
            errors.push_back(where + ": unknown field");
            continue;
        }
        json& slot = dst[key];
        if (slot.is_object()) {
            if (!value.is_object()) {
                errors.push_back(where + ": expected an object");
            } else {
                merge_into(slot, value, where, errors);
            }
        } else if (slot.is_array()) {
            if (!value.is_array()) {
                errors.push_back(where + ": expected an array");
            } else {
                slot = value;
            }
        } else if (slot.is_string()) {
            if (!value.is_string()) {
                errors.push_back(where + ": expected a string");
            } else {
                slot = value;
            }
        } else if (slot.is_number_integer()) {
            if (!value.is_number_integer()) {
                errors.push_back(where + ": expected an integer");
            } else {
                slot = value;
            }
        } else {  // floating-point slot accepts any number
            if (!value.is_number()) {
                errors.push_back(where + ": expected a number");
            } else {
                slot = value.get<double>();
            }
        }
    }
}

struct Checker {
    const json& doc;
    std::vector<std::string>& errors;

    double num(const char* sect, const char* key) const {
        return doc.at(sect).at(key).get<double>();
    }
    long integer(const char* sect, const char* key) const {
        return doc.at(sect).at(key).get<long>();
    }
    std::string str(const char* sect, const char* key) const {
        return doc.at(sect).at(key).get<std::string>();
    }
    void fail(const std::string& path, const std::string& expect) const {
        errors.push_back(path + ": expected " + expect);
    }
    void require(bool ok, const std::string& path,
                 const std::string& expect) const {
        if (!ok) fail(path, expect);
    }
};

void check_axis(const Checker& c, const char* name) {
    const json& a = c.doc.at(name);
    const double start = a.at("start").get<double>();
    const double stop = a.at("stop").get<double>();
    const long points = a.at("points").get<long>();
    const std::string scale = a.at("scale").get<std::string>();
    const std::string p = std::string(name);
    c.require(std::isfinite(start) && std::isfinite(stop), p + ".start",
              "finite endpoints");
    c.require(points >= 2 && points <= 100000, p + ".points",
              "an integer in [2, 100000]");
    c.require(scale == "lin" || scale == "log", p + ".scale",
              "'lin' or 'log'");
    if (scale == "log") {
        c.require(start > 0.0 && stop > 0.0, p + ".start",
                  "positive endpoints for a log axis");
    }
}

ModulationSpec modulation_from_name(const std::string& name) {
    if (name == "bfsk") return modulation_bfsk();
    if (name == "bpsk") return modulation_bpsk();
    if (name == "qpsk") return modulation_mpsk(4);
    const auto suffix = [&](const char* tail) -> int {
        const std::size_t n = std::string(tail).size();
        if (name.size() <= n || name.substr(name.size() - n) != tail) {
            return 0;
        }
        int m = 0;
        const auto res =
            std::from_chars(name.data(), name.data() + name.size() - n, m);
        return res.ec == std::errc() &&
                       res.ptr == name.data() + name.size() - n
                   ? m
                   : 0;
    };
    if (const int m = suffix("qam")) return modulation_mqam(m);
    if (const int m = suffix("psk")) return modulation_mpsk(m);
    throw ConfigError("unknown modulation '" + name + "'");
}

void validate_document(const json& doc, std::vector<std::string>& errors) {
    Checker c{doc, errors};

    try {
        figure_from_name(doc.at("figure").get<std::string>());
    } catch (const ConfigError&) {
        c.fail("figure", "one of the documented sweep names");
    }
    c.require(doc.at("seed").is_number_unsigned() ||
                  doc.at("seed").get<long long>() >= 0,
              "seed", "a non-negative integer");
    c.require(doc.at("threads").get<long>() >= 1 &&
                  doc.at("threads").get<long>() <= 1024,
              "threads", "an integer in [1, 1024]");
    check_axis(c, "axis");
    check_axis(c, "axis2");

    c.require(std::isfinite(c.num("snr", "gamma_th_db")), "snr.gamma_th_db",
              "a finite dB value");
    c.require(std::isfinite(c.num("snr", "p_t_db")), "snr.p_t_db",
              "a finite dB value");

    c.require(c.num("geometry", "l_sr") > 0.0, "geometry.l_sr",
              "a length > 0");
    c.require(c.num("geometry", "l_rd") > 0.0, "geometry.l_rd",
              "a length > 0");
    c.require(c.num("geometry", "l_d") > 0.0, "geometry.l_d", "a length > 0");
    c.require(c.num("geometry", "c_att") > 0.0, "geometry.c_att",
              "an attenuation > 0");
    const std::string water = c.str("geometry", "water");
    if (!water.empty()) {
        try {
            attenuation_for_water(water);
        } catch (const std::exception&) {
            c.fail("geometry.water",
                   "'pure_sea', 'clear_ocean', 'coastal_ocean', or empty");
        }
    }

    c.require(c.num("beam", "wavelength_nm") > 0.0 &&
                  c.num("beam", "wavelength_nm") < 10000.0,
              "beam.wavelength_nm", "a wavelength in (0, 10000) nm");
    c.require(c.num("beam", "w0") > 0.0, "beam.w0", "a waist > 0");
    c.require(c.num("beam", "d_r") > 0.0, "beam.d_r", "an aperture > 0");

    c.require(c.num("pointing", "sigma_theta") > 0.0, "pointing.sigma_theta",
              "a deviation > 0");
    c.require(c.num("pointing", "sigma_phi") > 0.0, "pointing.sigma_phi",
              "a deviation > 0");
    c.require(c.num("pointing", "sigma_disp") > 0.0, "pointing.sigma_disp",
              "a displacement > 0");
    for (const char* series : {"sigma_theta_series", "sigma_phi_series"}) {
        const json& arr = doc.at("pointing").at(series);
        const long points = doc.at("axis").at("points").get<long>();
        if (!arr.empty() &&
            static_cast<long>(arr.size()) != points) {
            c.fail(std::string("pointing.") + series,
                   "either empty or one entry per axis point");
        }
        for (std::size_t i = 0; i < arr.size(); ++i) {
            if (!arr[i].is_number() || !(arr[i].get<double>() > 0.0)) {
                c.fail(std::string("pointing.") + series + "[" +
                           std::to_string(i) + "]",
                       "a deviation > 0");
                break;
            }
        }
    }

    const std::string mode = c.str("turbulence", "mode");
    c.require(mode == "fixed" || mode == "strong" || mode == "otops",
              "turbulence.mode", "'fixed', 'strong', or 'otops'");
    c.require(c.num("turbulence", "alpha_direct") > 0.0,
              "turbulence.alpha_direct", "a shape > 0");
    c.require(c.num("turbulence", "alpha_hop") > 0.0, "turbulence.alpha_hop",
              "a shape > 0");
    c.require(c.num("turbulence", "beta_hop") > 0.0, "turbulence.beta_hop",
              "a shape > 0");
    c.require(c.num("turbulence", "epsilon1") > 0.0, "turbulence.epsilon1",
              "a dissipation rate > 0");
    c.require(c.num("turbulence", "epsilon2") > 0.0, "turbulence.epsilon2",
              "a dissipation rate > 0");
    c.require(c.num("turbulence", "chi_t") > 0.0, "turbulence.chi_t",
              "a dissipation rate > 0");
    c.require(c.num("turbulence", "nu") > 0.0, "turbulence.nu",
              "a viscosity > 0");
    c.require(c.num("turbulence", "s_a") > 0.0, "turbulence.s_a",
              "a salinity > 0");
    c.require(c.num("turbulence", "pressure") >= 0.0, "turbulence.pressure",
              "a pressure >= 0");
    c.require(c.num("turbulence", "h") != 0.0, "turbulence.h",
              "a nonzero gradient ratio");
    const double omega = c.num("turbulence", "omega");
    c.require(omega >= -5.0 && omega < 0.0, "turbulence.omega",
              "a value in [-5, 0)");

    c.require(c.integer("oris", "n_elements") >= 1 &&
                  c.integer("oris", "n_elements") <= 4096,
              "oris.n_elements", "an integer in [1, 4096]");
    const json& n_list = doc.at("oris").at("n_list");
    c.require(!n_list.empty(), "oris.n_list", "a non-empty array");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (!n_list[i].is_number_integer() || n_list[i].get<long>() < 1) {
            c.fail("oris.n_list[" + std::to_string(i) + "]",
                   "an integer >= 1");
        }
    }
    c.require(c.integer("oris", "quantizer_bits") >= 1 &&
                  c.integer("oris", "quantizer_bits") <= 30,
              "oris.quantizer_bits", "an integer in [1, 30]");
    c.require(c.num("oris", "sigma_phase") >= 0.0, "oris.sigma_phase",
              "a residual std >= 0");
    c.require(c.num("oris", "active_gain_db") > 0.0, "oris.active_gain_db",
              "a gain > 0 dB");
    c.require(c.num("oris", "active_sigma_phase") >= 0.0,
              "oris.active_sigma_phase", "a residual std >= 0");
    c.require(std::isfinite(c.num("oris", "active_p_noise_dbw")),
              "oris.active_p_noise_dbw", "a finite dBW value");

    const json& mods = doc.at("modulations");
    c.require(!mods.empty(), "modulations", "a non-empty array");
    for (std::size_t i = 0; i < mods.size(); ++i) {
        if (!mods[i].is_string()) {
            c.fail("modulations[" + std::to_string(i) + "]", "a string");
            continue;
        }
        try {
            modulation_from_name(mods[i].get<std::string>());
        } catch (const std::exception&) {
            c.fail("modulations[" + std::to_string(i) + "]",
                   "a supported scheme (bfsk, bpsk, qpsk, <m>qam, <m>psk)");
        }
    }
    const std::string det = doc.at("detection").get<std::string>();
    c.require(det == "hd" || det == "imdd", "detection", "'hd' or 'imdd'");

    c.require(c.integer("mc", "trials") >= 1 &&
                  c.integer("mc", "trials") <= 1000000000L,
              "mc.trials", "an integer in [1, 1e9]");

    const long u = c.integer("uoap", "u");
    const long v = c.integer("uoap", "v");
    c.require(u >= 0, "uoap.u", "an integer >= 0");
    c.require(v >= 0, "uoap.v", "an integer >= 0");
    c.require(u + v >= 1 && u + v <= 5, "uoap.u",
              "u + v in [1, 5] (at most five parallel links)");
    c.require(c.integer("uoap", "t_nodes") >= 1 &&
                  c.integer("uoap", "t_nodes") <= 512,
              "uoap.t_nodes", "an integer in [1, 512]");
    c.require(c.num("uoap", "c_th") >= 0.0, "uoap.c_th", "a capacity >= 0");

    PONConfig pon;
    const json& pj = doc.at("pon");
    pon.r_up_branch = pj.at("r_up_branch").get<double>();
    pon.r_up_total = pj.at("r_up_total").get<double>();
    pon.fiber_km = pj.at("fiber_km").get<double>();
    pon.t_prop_per_km = pj.at("t_prop_per_km").get<double>();
    pon.t_fec = pj.at("t_fec").get<double>();
    pon.t_proc = pj.at("t_proc").get<double>();
    pon.t_base = pj.at("t_base").get<double>();
    pon.t_report = pj.at("t_report").get<double>();
    pon.t_grant = pj.at("t_grant").get<double>();
    pon.t_guard = pj.at("t_guard").get<double>();
    pon.t_service = pj.at("t_service").get<double>();
    pon.k_proc = pj.at("k_proc").get<double>();
    pon.alpha_powerlaw = pj.at("alpha_powerlaw").get<double>();
    pon.eta = pj.at("eta").get<double>();
    pon.c_max = pj.at("c_max").get<double>();
    pon.alpha_zipf = pj.at("alpha_zipf").get<double>();
    pon.overload_factor = pj.at("overload_factor").get<double>();
    pon.t_queue_base = pj.at("t_queue_base").get<double>();
    pon.k_load = pj.at("k_load").get<double>();
    pon.queue_noise_std = pj.at("queue_noise_std").get<double>();
    try {
        validate_pon(pon);
    } catch (const std::exception& e) {
        errors.push_back(std::string("pon: ") + e.what());
    }
}

AxisSpec axis_from_json(const json& a) {
    return {a.at("start").get<double>(), a.at("stop").get<double>(),
            a.at("points").get<int>(),
            a.at("scale").get<std::string>() == "log"};
}

SweepSpec spec_from_document(const json& doc) {
    SweepSpec spec;
    spec.figure = figure_from_name(doc.at("figure").get<std::string>());
    spec.axis = axis_from_json(doc.at("axis"));
    spec.axis2 = axis_from_json(doc.at("axis2"));

    RunConfig& c = spec.config;
    c.seed = doc.at("seed").get<std::uint64_t>();
    c.threads = doc.at("threads").get<int>();
    c.gamma_th_db = doc.at("snr").at("gamma_th_db").get<double>();
    c.p_t_db = doc.at("snr").at("p_t_db").get<double>();
    c.sigma_n2_oris_dbm = doc.at("snr").at("sigma_n2_oris_dbm").get<double>();
    c.sigma_n2_direct_dbm =
        doc.at("snr").at("sigma_n2_direct_dbm").get<double>();

    const json& g = doc.at("geometry");
    c.geometry.l_sr = g.at("l_sr").get<double>();
    c.geometry.l_rd = g.at("l_rd").get<double>();
    c.geometry.l_d = g.at("l_d").get<double>();
    c.geometry.c_att = g.at("c_att").get<double>();
    c.water = g.at("water").get<std::string>();
    if (!c.water.empty()) {
        c.geometry.c_att = attenuation_for_water(c.water);
    }

    c.wavelength = doc.at("beam").at("wavelength_nm").get<double>() * 1e-9;
    c.w0 = doc.at("beam").at("w0").get<double>();
    c.d_r = doc.at("beam").at("d_r").get<double>();

    c.sigma_theta = doc.at("pointing").at("sigma_theta").get<double>();
    c.sigma_phi = doc.at("pointing").at("sigma_phi").get<double>();
    c.sigma_disp = doc.at("pointing").at("sigma_disp").get<double>();
    c.sigma_theta_series =
        doc.at("pointing").at("sigma_theta_series").get<std::vector<double>>();
    c.sigma_phi_series =
        doc.at("pointing").at("sigma_phi_series").get<std::vector<double>>();

    const json& t = doc.at("turbulence");
    const std::string mode = t.at("mode").get<std::string>();
    c.turb_mode = mode == "fixed"    ? RunConfig::TurbMode::kFixed
                  : mode == "strong" ? RunConfig::TurbMode::kStrong
                                     : RunConfig::TurbMode::kOtops;
    c.alpha_direct_fixed = t.at("alpha_direct").get<double>();
    c.alpha_hop_fixed = t.at("alpha_hop").get<double>();
    c.beta_hop_fixed = t.at("beta_hop").get<double>();
    c.env.t_mean = t.at("t_mean").get<double>();
    c.env.s_a = t.at("s_a").get<double>();
    c.env.pressure = t.at("pressure").get<double>();
    c.env.h = t.at("h").get<double>();
    c.env.chi_t = t.at("chi_t").get<double>();
    c.env.nu = t.at("nu").get<double>();
    c.epsilon1 = t.at("epsilon1").get<double>();
    c.epsilon2 = t.at("epsilon2").get<double>();
    c.omega = t.at("omega").get<double>();

    const json& o = doc.at("oris");
    c.n_elements = o.at("n_elements").get<int>();
    c.n_list = o.at("n_list").get<std::vector<int>>();
    c.quantizer_bits = o.at("quantizer_bits").get<int>();
    c.sigma_phase = o.at("sigma_phase").get<double>();
    c.active_gain_db = o.at("active_gain_db").get<double>();
    c.active_sigma_phase = o.at("active_sigma_phase").get<double>();
    c.active_p_noise_dbw = o.at("active_p_noise_dbw").get<double>();

    c.modulations = doc.at("modulations").get<std::vector<std::string>>();
    c.detection = doc.at("detection").get<std::string>() == "imdd"
                      ? Detection::kIntensity
                      : Detection::kHeterodyne;
    c.mc_trials = doc.at("mc").at("trials").get<long>();

    c.u_links = doc.at("uoap").at("u").get<int>();
    c.v_links = doc.at("uoap").at("v").get<int>();
    c.t_nodes = doc.at("uoap").at("t_nodes").get<int>();
    c.c_th = doc.at("uoap").at("c_th").get<double>();

    const json& pj = doc.at("pon");
    c.pon.r_up_branch = pj.at("r_up_branch").get<double>();
    c.pon.r_up_total = pj.at("r_up_total").get<double>();
    c.pon.fiber_km = pj.at("fiber_km").get<double>();
    c.pon.t_prop_per_km = pj.at("t_prop_per_km").get<double>();
    c.pon.t_fec = pj.at("t_fec").get<double>();
    c.pon.t_proc = pj.at("t_proc").get<double>();
    c.pon.t_base = pj.at("t_base").get<double>();
    c.pon.t_report = pj.at("t_report").get<double>();
    c.pon.t_grant = pj.at("t_grant").get<double>();
    c.pon.t_guard = pj.at("t_guard").get<double>();
    c.pon.t_service = pj.at("t_service").get<double>();
    c.pon.k_proc = pj.at("k_proc").get<double>();
    c.pon.alpha_powerlaw = pj.at("alpha_powerlaw").get<double>();
    c.pon.eta = pj.at("eta").get<double>();
    c.pon.c_max = pj.at("c_max").get<double>();
    c.pon.alpha_zipf = pj.at("alpha_zipf").get<double>();
    c.pon.overload_factor = pj.at("overload_factor").get<double>();
    c.pon.t_queue_base = pj.at("t_queue_base").get<double>();
    c.pon.k_load = pj.at("k_load").get<double>();
    c.pon.queue_noise_std = pj.at("queue_noise_std").get<double>();
    c.pon_noise_seed = pj.at("noise_seed").get<long>();
    return spec;
}

}  // namespace

std::optional<SweepSpec> parse_sweep(const std::string& json_text,
                                     std::vector<std::string>& errors) {
    json user = json::object();
    const bool blank =
        json_text.find_first_not_of(" \t\r\n") == std::string::npos;
    if (!blank) {
        try {
            user = json::parse(json_text);
        } catch (const json::parse_error& e) {
            errors.push_back(std::string("config: not valid JSON (") +
                             e.what() + ")");
            return std::nullopt;
        }
        if (!user.is_object()) {
            errors.push_back("config: top level must be an object");
            return std::nullopt;
        }
    }

    json doc = default_document();
    merge_into(doc, user, "", errors);
    if (errors.empty()) validate_document(doc, errors);

    SweepSpec spec;
    if (errors.empty()) spec = spec_from_document(doc);
    spec.normalized_json = doc.dump(2) + "\n";
    spec.config_hash = fnv1a64(doc.dump());
    if (!errors.empty()) return std::nullopt;
    return spec;
}

// ---------------------------------------------------------------------------
// Link derivation

namespace {

struct HopShapes {
    double alpha_direct;
    double alpha_hop;
    double beta_hop;
};

HopShapes derive_shapes(const RunConfig& c, const LinkGeometry& g) {
    switch (c.turb_mode) {
        case RunConfig::TurbMode::kFixed:
            return {c.alpha_direct_fixed, c.alpha_hop_fixed, c.beta_hop_fixed};
        case RunConfig::TurbMode::kStrong: {
            OceanSpectrumParams p;
            p.epsilon = c.epsilon1;
            p.chi_t = c.env.chi_t;
            p.omega = c.omega;
            p.nu = c.env.nu;
            const double k = 2.0 * 3.14159265358979323846 / c.wavelength;
            const double s_sr = rytov_plane(
                cn2_strong(p, c.wavelength, g.l_sr), k, g.l_sr);
            OceanSpectrumParams p2 = p;
            p2.epsilon = c.epsilon2;
            const double s_rd = rytov_plane(
                cn2_strong(p2, c.wavelength, g.l_rd), k, g.l_rd);
            const double s_d = rytov_plane(
                cn2_strong(p, c.wavelength, g.l_d), k, g.l_d);
            const GGShape hop = gg_from_rytov(s_sr, s_rd);
            const GGShape direct = gg_from_rytov(s_d, s_d);
            return {direct.alpha, hop.alpha, hop.beta};
        }
        case RunConfig::TurbMode::kOtops:
        default: {
            OTOPSEnv e1 = c.env;
            e1.epsilon = c.epsilon1;
            OTOPSEnv e2 = c.env;
            e2.epsilon = c.epsilon2;
            BeamGeometry beam;
            beam.wavelength = c.wavelength;
            beam.w0 = c.w0;
            beam.f0 = 0.0;  // collimated
            beam.length = g.l_sr;
            const GGShape s1 =
                gg_from_otops(rytov_gaussian(e1, beam), beam.theta1());
            beam.length = g.l_rd;
            const GGShape s2 =
                gg_from_otops(rytov_gaussian(e2, beam), beam.theta1());
            beam.length = g.l_d;
            const GGShape sd =
                gg_from_otops(rytov_gaussian(e1, beam), beam.theta1());
            return {sd.alpha, s1.alpha, s2.beta};
        }
    }
}

struct LinkSet {
    DirectLink direct;
    OrisLink oris;
    double alpha_hop;
    double beta_hop;
    double gamma_bar_direct;  // power-budget mean SNR, linear
    double gamma_bar_oris;
};

LinkSet derive_links(const RunConfig& c, const LinkGeometry& g) {
    const HopShapes s = derive_shapes(c, g);
    const PointingError pd = pointing_from_displacement(
        c.sigma_disp, c.d_r, c.w0, c.wavelength, g.l_d);
    const PointingError pr = pointing_from_jitter(
        c.sigma_theta, c.sigma_phi, g.l_sr, g.l_rd, c.d_r, c.w0,
        c.wavelength);
    const AggregateResult ag =
        aggregate_gg(s.alpha_hop, s.beta_hop, c.n_elements);
    LinkSet out;
    out.direct = DirectLink{s.alpha_direct, pd.xi_sq, pd.a0};
    out.oris = OrisLink{ag.a, ag.b, pr.xi_sq, pr.a0, c.n_elements};
    out.alpha_hop = s.alpha_hop;
    out.beta_hop = s.beta_hop;
    out.gamma_bar_direct =
        make_snr_context(c.p_t_db, c.sigma_n2_direct_dbm,
                         path_loss(g, PathKind::kDirect))
            .gamma_bar;
    out.gamma_bar_oris =
        make_snr_context(c.p_t_db, c.sigma_n2_oris_dbm,
                         path_loss(g, PathKind::kCascaded))
            .gamma_bar;
    return out;
}

// ---------------------------------------------------------------------------
// Sweep execution helpers

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

class ErrorLog {
  public:
    void add(std::string msg) {
        std::lock_guard<std::mutex> lock(mu_);
        messages_.push_back(std::move(msg));
    }
    std::vector<std::string> take() {
        std::lock_guard<std::mutex> lock(mu_);
        std::sort(messages_.begin(), messages_.end());
        return std::move(messages_);
    }

  private:
    std::mutex mu_;
    std::vector<std::string> messages_;
};

void parallel_rows(int n_rows, int threads,
                   const std::function<void(int)>& do_row) {
    const int workers = std::max(1, std::min(threads, n_rows));
    if (workers == 1) {
        for (int i = 0; i < n_rows; ++i) do_row(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex err_mu;
    std::exception_ptr err = nullptr;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            try {
                for (;;) {
                    const int i = next.fetch_add(1);
                    if (i >= n_rows) break;
                    do_row(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

std::vector<std::string> render_row(const std::vector<double>& cells) {
    std::vector<std::string> out;
    out.reserve(cells.size());
    for (double v : cells) out.push_back(format_csv_value(v));
    return out;
}

// Evaluates one guarded cell; failures leave NaN and are logged with the
// row/column location.
template <typename Fn>
void guarded_cell(double& cell, int row, const std::string& column,
                  ErrorLog& log, Fn&& fn) {
    try {
        cell = fn();
    } catch (const std::exception& e) {
        log.add("row " + std::to_string(row) + " " + column + ": " +
                e.what());
    }
}

// Generic numeric sweep: one shared row context, per-cell guards, worker
// pool across rows, output in axis order.
struct NumericColumn {
    std::string name;
    std::function<double(int row, double x)> eval;
};

Table run_numeric(const std::vector<double>& xs, const std::string& x_name,
                  std::vector<NumericColumn> columns, int threads,
                  ErrorLog& log) {
    Table table;
    table.columns.push_back(x_name);
    for (const auto& col : columns) table.columns.push_back(col.name);
    table.rows.assign(xs.size(), {});
    parallel_rows(static_cast<int>(xs.size()), threads, [&](int i) {
        const double x = xs[static_cast<std::size_t>(i)];
        std::vector<double> cells(columns.size() + 1, kNaN);
        cells[0] = x;
        for (std::size_t j = 0; j < columns.size(); ++j) {
            guarded_cell(cells[j + 1], i, columns[j].name, log,
                         [&] { return columns[j].eval(i, x); });
        }
        table.rows[static_cast<std::size_t>(i)] = render_row(cells);
    });
    return table;
}

std::uint64_t mix_seed(std::uint64_t seed, int row, int lane) {
    std::string key = std::to_string(seed) + "/" + std::to_string(row) +
                      "/" + std::to_string(lane);
    return fnv1a64(key);
}

// ---------------------------------------------------------------------------
// Figure builders

Table build_op_vs_snr(const SweepSpec& spec, ErrorLog& log) {
    const RunConfig& c = spec.config;
    const LinkSet links = derive_links(c, c.geometry);
    const double gth = db_to_linear(c.gamma_th_db);
    std::vector<NumericColumn> cols;
    cols.push_back({"op_direct", [&, links](int, double x) {
                        return op_direct(db_to_linear(x), gth, links.direct);
                    }});
    for (int n : c.n_list) {
        const AggregateResult ag =
            aggregate_gg(links.alpha_hop, links.beta_hop, n);
        const OrisLink link{ag.a, ag.b, links.oris.xi_sq, links.oris.a0, n};
        cols.push_back({"op_oris_n" + std::to_string(n),
                        [gth, link](int, double x) {
                            return op_oris(db_to_linear(x), gth, link);
                        }});
    }
    return run_numeric(spec.axis.values(), "gamma_bar_db", std::move(cols),
                       resolve_threads(c.threads), log);
}

Table build_op_combining(const SweepSpec& spec, ErrorLog& log) {
    const RunConfig& c = spec.config;
    const LinkSet links = derive_links(c, c.geometry);
    const double gth = db_to_linear(c.gamma_th_db);
    std::vector<NumericColumn> cols;
    cols.push_back({"op_direct", [gth, links](int, double x) {
                        return op_direct(db_to_linear(x), gth, links.direct);
                    }});
    cols.push_back({"op_oris", [gth, links](int, double x) {
                        return op_oris(db_to_linear(x), gth, links.oris);
                    }});
    cols.push_back({"op_sc", [gth, links](int, double x) {
                        const double g = db_to_linear(x);
                        return op_sc(op_direct(g, gth, links.direct),
                                     op_oris(g, gth, links.oris));
                    }});
    cols.push_back({"op_mrc", [gth, links](int, double x) {
                        return op_mrc(db_to_linear(x), gth, links.direct,
                                      links.oris);
                    }});
    return run_numeric(spec.axis.values(), "gamma_bar_db", std::move(cols),
                       resolve_threads(c.threads), log);
}

Table build_op_configs_mc(const SweepSpec& spec, ErrorLog& log) {
    const RunConfig& c = spec.config;
    const LinkSet links = derive_links(c, c.geometry);
    const double gth = db_to_linear(c.gamma_th_db);
    const std::vector<OrisConfig> configs = {
        PassiveIdeal{},
        PassiveQuantized{c.quantizer_bits},
        PassiveControlled{c.sigma_phase},
        PassiveRandom{},
        ActiveControlled{c.active_gain_db, c.active_sigma_phase,
                         c.active_p_noise_dbw},
    };
    const std::vector<double> xs = spec.axis.values();
    const int lanes = static_cast<int>(configs.size());
    const int n_tasks = static_cast<int>(xs.size()) * lanes;

    Table table;
    table.columns = {"gamma_bar_db", "config", "N",     "trials",
                     "op_hat",       "op_lo",  "op_hi"};
    table.rows.assign(static_cast<std::size_t>(n_tasks), {});
    parallel_rows(n_tasks, resolve_threads(c.threads), [&](int task) {
        const int i = task / lanes;
        const int k = task % lanes;
        const double x = xs[static_cast<std::size_t>(i)];
        std::vector<std::string> row(7, "nan");
        row[0] = format_csv_value(x);
        row[1] = config_label(configs[static_cast<std::size_t>(k)]);
        row[2] = format_csv_value(c.n_elements);
        row[3] = format_csv_value(static_cast<double>(c.mc_trials));
        try {
            SimPlan plan;
            plan.trials = c.mc_trials;
            plan.seed = mix_seed(c.seed, i, k);
            plan.n_elements = c.n_elements;
            plan.alpha = links.alpha_hop;
            plan.beta = links.beta_hop;
            plan.xi_sq = links.oris.xi_sq;
            plan.a0 = links.oris.a0;
            plan.gamma_bar = db_to_linear(x);
            plan.threads = 1;  // rows already run in the worker pool
            const OpEstimate est = empirical_op(
                simulate_snr(configs[static_cast<std::size_t>(k)], plan),
                gth);
            row[4] = format_csv_value(est.op_hat);
            row[5] = format_csv_value(est.lo);
            row[6] = format_csv_value(est.hi);
        } catch (const std::exception& e) {
            log.add("row " + std::to_string(task) + " " + row[1] + ": " +
                    e.what());
        }
        table.rows[static_cast<std::size_t>(task)] = std::move(row);
    });
    return table;
}

Table build_ber_vs_snr(const SweepSpec& spec, ErrorLog& log) {
    const RunConfig& c = spec.config;
    const LinkSet links = derive_links(c, c.geometry);
    std::vector<NumericColumn> cols;
    for (const std::string& name : c.modulations) {
        const ModulationSpec mod = modulation_from_name(name);
        cols.push_back({"ber_direct_" + name, [links, mod](int, double x) {
                            return ber_direct(db_to_linear(x), links.direct,
                                              mod);
                        }});
        cols.push_back({"ber_oris_" + name, [links, mod](int, double x) {
                            return ber_oris(db_to_linear(x), links.oris, mod);
                        }});
    }
    return run_numeric(spec.axis.values(), "gamma_bar_db", std::move(cols),
                       resolve_threads(c.threads), log);
}

Table build_ber_vs_length(const SweepSpec& spec, ErrorLog& log) {
    const RunConfig& c = spec.config;
    const ModulationSpec mod = modulation_from_name(c.modulations.front());
    const double split =
        c.geometry.l_sr / (c.geometry.l_sr + c.geometry.l_rd);
    std::vector<NumericColumn> cols;
    // Each row re-derives both links at its own geometry; the direct path
    // spans the length, the reflected path splits it in the configured
    // ratio. The mean SNR follows the power budget at that length.
    auto links_at = [c, split](double length) {
        LinkGeometry g = c.geometry;
        g.l_d = length;
        g.l_sr = split * length;
        g.l_rd = (1.0 - split) * length;
        return derive_links(c, g);
    };
    cols.push_back({"ber_direct", [links_at, mod](int, double x) {
                        const LinkSet l = links_at(x);
                        return ber_direct(l.gamma_bar_direct, l.direct, mod);
                    }});
    cols.push_back({"ber_oris", [links_at, mod](int, double x) {
                        const LinkSet l = links_at(x);
                        return ber_oris(l.gamma_bar_oris, l.oris, mod);
                    }});
    return run_numeric(spec.axis.values(), "length_m", std::move(cols),
                       resolve_threads(c.threads), log);
}

Table build_ber_vs_placement(const SweepSpec& spec, ErrorLog& log) {
    const RunConfig& c = spec.config;
    const ModulationSpec mod = modulation_from_name(c.modulations.front());
    const double l_sd = c.geometry.l_sr + c.geometry.l_rd;
    const std::vector<std::string> waters = {"pure_sea", "clear_ocean",
                                             "coastal_ocean"};
    std::vector<NumericColumn> cols;
    for (const std::string& water : waters) {
        const double c_att = attenuation_for_water(water);
        cols.push_back(
            {"ber_oris_" + water, [c, l_sd, c_att, mod](int row, double x) {
                 if (!(x > 0.0) || !(x < 1.0)) {
                     throw DomainError(
                         "placement ratio must lie in (0, 1)");
                 }
                 RunConfig rc = c;
                 if (!rc.sigma_theta_series.empty()) {
                     rc.sigma_theta = rc.sigma_theta_series[
                         static_cast<std::size_t>(row)];
                 }
                 if (!rc.sigma_phi_series.empty()) {
                     rc.sigma_phi = rc.sigma_phi_series[
                         static_cast<std::size_t>(row)];
                 }
                 LinkGeometry g = rc.geometry;
                 g.l_sr = x * l_sd;
                 g.l_rd = (1.0 - x) * l_sd;
                 g.c_att = c_att;
                 const LinkSet l = derive_links(rc, g);
                 return ber_oris(l.gamma_bar_oris, l.oris, mod);
             }});
    }
    return run_numeric(spec.axis.values(), "ratio_sr_sd", std::move(cols),
                       resolve_threads(c.threads), log);
}

Table build_soc_vs_snr(const SweepSpec& spec, ErrorLog& log) {
    const RunConfig& c = spec.config;
    const LinkSet links = derive_links(c, c.geometry);
    const double gth = db_to_linear(c.gamma_th_db);
    std::vector<NumericColumn> cols;
    cols.push_back({"soc", [gth, links](int, double x) {
                        return soc(db_to_linear(x), gth, links.oris);
                    }});
    return run_numeric(spec.axis.values(), "gamma_bar_db", std::move(cols),
                       resolve_threads(c.threads), log);
}

Table build_do_vs_snr(const SweepSpec& spec, ErrorLog& log) {
    const RunConfig& c = spec.config;
    const LinkSet links = derive_links(c, c.geometry);
    const double gth = db_to_linear(c.gamma_th_db);
    const double asym =
        ado(links.oris.a, links.oris.b, links.oris.xi_sq);
    std::vector<NumericColumn> cols;
    cols.push_back({"do", [gth, links](int, double x) {
                        return diversity_order(db_to_linear(x), gth,
                                               links.oris);
                    }});
    cols.push_back({"ado", [asym](int, double) { return asym; }});
    return run_numeric(spec.axis.values(), "gamma_bar_db", std::move(cols),
                       resolve_threads(c.threads), log);
}

Table build_capacity_vs_snr(const SweepSpec& spec, ErrorLog& log) {
    const RunConfig& c = spec.config;
    const LinkSet links = derive_links(c, c.geometry);
    std::vector<NumericColumn> cols;
    cols.push_back({"cap_direct", [links, c](int, double x) {
                        return capacity_direct(db_to_linear(x), links.direct,
                                               c.detection);
                    }});
    cols.push_back({"cap_oris", [links, c](int, double x) {
                        return capacity_oris(db_to_linear(x), links.oris,
                                             c.detection);
                    }});
    return run_numeric(spec.axis.values(), "gamma_bar_db", std::move(cols),
                       resolve_threads(c.threads), log);
}

Table build_surface_3d(const SweepSpec& spec, ErrorLog& log) {
    const RunConfig& c = spec.config;
    const LinkSet links = derive_links(c, c.geometry);
    const double gth = db_to_linear(c.gamma_th_db);
    const std::vector<double> xs = spec.axis.values();
    std::vector<int> ns;
    for (double y : spec.axis2.values()) {
        ns.push_back(std::max(1, static_cast<int>(std::lround(y))));
    }
    Table table;
    table.columns = {"gamma_bar_db", "n_elements", "op_oris"};
    const int n_rows = static_cast<int>(xs.size() * ns.size());
    table.rows.assign(static_cast<std::size_t>(n_rows), {});
    parallel_rows(n_rows, resolve_threads(c.threads), [&](int idx) {
        const int i = idx / static_cast<int>(ns.size());
        const int j = idx % static_cast<int>(ns.size());
        const double x = xs[static_cast<std::size_t>(i)];
        const int n = ns[static_cast<std::size_t>(j)];
        std::vector<double> cells = {x, static_cast<double>(n), kNaN};
        guarded_cell(cells[2], idx, "op_oris", log, [&] {
            const AggregateResult ag =
                aggregate_gg(links.alpha_hop, links.beta_hop, n);
            const OrisLink link{ag.a, ag.b, links.oris.xi_sq, links.oris.a0,
                                n};
            return op_oris(db_to_linear(x), gth, link);
        });
        table.rows[static_cast<std::size_t>(idx)] = render_row(cells);
    });
    return table;
}

Table build_pon_delay_throughput(const SweepSpec& spec, ErrorLog& log) {
    const RunConfig& c = spec.config;
    Table table;
    table.columns = {"t_nodes",  "th_ideal", "th_total", "th_min",
                     "th_max",   "th_avg",   "p_loss",   "delay_s"};
    const std::vector<double> xs = spec.axis.values();
    table.rows.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const int t_nodes =
            std::max(1, static_cast<int>(std::lround(xs[i])));
        std::vector<double> cells(8, kNaN);
        cells[0] = t_nodes;
        guarded_cell(cells[1], static_cast<int>(i), "throughput", log, [&] {
            const ThroughputReport rep =
                allocate(zipf_demands(t_nodes, c.pon.alpha_zipf,
                                      c.pon.r_up_total,
                                      c.pon.overload_factor),
                         c.pon);
            cells[2] = std::accumulate(rep.th_real.begin(),
                                       rep.th_real.end(), 0.0);
            cells[3] = rep.th_min;
            cells[4] = rep.th_max;
            cells[5] = rep.th_avg;
            cells[6] = rep.p_loss;
            return rep.th_ideal;
        });
        guarded_cell(cells[7], static_cast<int>(i), "delay_s", log, [&] {
            std::optional<std::uint64_t> noise;
            if (c.pon_noise_seed >= 0) {
                noise = static_cast<std::uint64_t>(c.pon_noise_seed) +
                        static_cast<std::uint64_t>(t_nodes);
            }
            return total_delay(t_nodes, c.pon, noise);
        });
        table.rows.push_back(render_row(cells));
    }
    return table;
}

Table build_total_capacity_switching(const SweepSpec& spec, ErrorLog& log) {
    const RunConfig& c = spec.config;
    const LinkSet links = derive_links(c, c.geometry);
    std::vector<NumericColumn> cols;
    auto caps_at = [links, c](double x) {
        const double g = db_to_linear(x);
        return std::pair<double, double>(
            capacity_direct(g, links.direct, c.detection),
            capacity_oris(g, links.oris, c.detection));
    };
    cols.push_back({"cap_direct",
                    [caps_at](int, double x) { return caps_at(x).first; }});
    cols.push_back({"cap_oris",
                    [caps_at](int, double x) { return caps_at(x).second; }});
    cols.push_back({"cap_switch", [caps_at, c](int, double x) {
                        const auto [cd, cr] = caps_at(x);
                        return hard_switch(cd, cr, c.c_th,
                                           SwitchMode::kThreshold);
                    }});
    cols.push_back({"cap_optimal", [caps_at, c](int, double x) {
                        const auto [cd, cr] = caps_at(x);
                        return hard_switch(cd, cr, c.c_th,
                                           SwitchMode::kOptimal);
                    }});
    cols.push_back({"cap_uoap", [caps_at, c](int, double x) {
                        const auto [cd, cr] = caps_at(x);
                        return capacity_uoap(
                            std::vector<double>(
                                static_cast<std::size_t>(c.u_links), cd),
                            std::vector<double>(
                                static_cast<std::size_t>(c.v_links), cr));
                    }});
    cols.push_back({"cap_total", [caps_at, c](int, double x) {
                        const auto [cd, cr] = caps_at(x);
                        const double uoap = capacity_uoap(
                            std::vector<double>(
                                static_cast<std::size_t>(c.u_links), cd),
                            std::vector<double>(
                                static_cast<std::size_t>(c.v_links), cr));
                        return capacity_total(c.t_nodes, uoap, c.pon);
                    }});
    return run_numeric(spec.axis.values(), "gamma_bar_db", std::move(cols),
                       resolve_threads(c.threads), log);
}

std::string render_csv(const Table& table) {
    std::string out;
    const auto join = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out.push_back(',');
            out += cells[i];
        }
        out.push_back('\n');
    };
    join(table.columns);
    for (const auto& row : table.rows) join(row);
    return out;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17] = {};
    for (int i = 15; i >= 0; --i) {
        buf[i] = "0123456789abcdef"[h & 0xf];
        h >>= 4;
    }
    return std::string(buf, 16);
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    const auto t0 = std::chrono::steady_clock::now();
    ErrorLog log;
    Table table;
    switch (spec.figure) {
        case Figure::kOpVsSnr: table = build_op_vs_snr(spec, log); break;
        case Figure::kOpCombining:
            table = build_op_combining(spec, log);
            break;
        case Figure::kOpConfigsMc:
            table = build_op_configs_mc(spec, log);
            break;
        case Figure::kBerVsSnr: table = build_ber_vs_snr(spec, log); break;
        case Figure::kBerVsLength:
            table = build_ber_vs_length(spec, log);
            break;
        case Figure::kBerVsPlacement:
            table = build_ber_vs_placement(spec, log);
            break;
        case Figure::kSocVsSnr: table = build_soc_vs_snr(spec, log); break;
        case Figure::kDoVsSnr: table = build_do_vs_snr(spec, log); break;
        case Figure::kCapacityVsSnr:
            table = build_capacity_vs_snr(spec, log);
            break;
        case Figure::kSurface3d: table = build_surface_3d(spec, log); break;
        case Figure::kPonDelayThroughput:
            table = build_pon_delay_throughput(spec, log);
            break;
        case Figure::kTotalCapacitySwitching:
            table = build_total_capacity_switching(spec, log);
            break;
    }
    SweepResult result;
    result.columns = table.columns;
    result.rows = table.rows;
    result.errors = log.take();
    result.csv = render_csv(table);
    const auto t1 = std::chrono::steady_clock::now();
    result.wall_time_s =
        std::chrono::duration<double>(t1 - t0).count();

    json manifest;
    manifest["figure"] = figure_name(spec.figure);
    manifest["tool_version"] = kToolVersion;
    manifest["seed"] = spec.config.seed;
    manifest["threads"] = resolve_threads(spec.config.threads);
    manifest["config_hash"] = hash_hex(spec.config_hash);
    manifest["wall_time_s"] = result.wall_time_s;
    manifest["rows"] = result.rows.size();
    manifest["columns"] = result.columns;
    manifest["errors"] = result.errors;
    result.manifest = manifest.dump(2) + "\n";
    return result;
}

// ---------------------------------------------------------------------------
// Oracle corpus replay

OracleReport run_oracle(const std::string& corpus_path) {
    std::ifstream in(corpus_path);
    if (!in) {
        throw ConfigError("oracle: cannot open corpus file '" + corpus_path +
                          "'");
    }
    OracleReport report;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string name;
        int m = 0, n = 0, p = 0, q = 0, is_log = 0, sign = 0;
        double a[5] = {}, b[9] = {}, z = 0.0, value = 0.0, rel_tol = 0.0;
        row >> name >> m >> n >> p >> q;
        for (double& x : a) row >> x;
        for (double& x : b) row >> x;
        row >> z >> is_log >> sign >> value >> rel_tol;
        if (!row) {
            ++report.total;
            ++report.failed;
            report.failures.push_back(name.empty() ? "<unparsed line>"
                                                   : name + ": bad record");
            continue;
        }
        ++report.total;
        try {
            const MeijerOrder order(m, n, std::vector<double>(a, a + p),
                                    std::vector<double>(b, b + q));
            const MeijerResult res = meijer_g(order, z);
            bool ok = res.converged && res.sign == sign;
            if (ok) {
                ok = is_log ? std::fabs(res.log_abs - value) <= rel_tol
                            : std::fabs(res.value - value) <=
                                  rel_tol * std::fabs(value);
            }
            if (!ok) {
                ++report.failed;
                report.failures.push_back(
                    name + ": got " +
                    format_csv_value(is_log ? res.log_abs : res.value) +
                    ", want " + format_csv_value(value));
            }
        } catch (const std::exception& e) {
            ++report.failed;
            report.failures.push_back(name + ": " + e.what());
        }
    }
    return report;
}

}  // namespace uwoc
