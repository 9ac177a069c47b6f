#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sobtrace/ball_portion.hpp"
#include "sobtrace/domains.hpp"
#include "sobtrace/isoperimetry.hpp"
#include "sobtrace/lorentz.hpp"
#include "sobtrace/rearrangement.hpp"
#include "sobtrace/reproductions.hpp"
#include "sobtrace/svg.hpp"
#include "sobtrace/traces.hpp"

using namespace sobtrace;

namespace {

struct RunConfig {
    std::string gallery;
    std::string csv;
    std::string field = "inv_d";
    double p = 1.0;
    std::string q = "inf";
    double h = 0.0;
    int k_max = kDefaultKMax;
    std::uint64_t seed = 0;
    double probe_decades = 6.0;
    double ac_threshold = 1e-3;
    std::string out;
    bool json = false;
    std::vector<std::string> only;
    std::vector<double> s;
    std::size_t mc = 20000;
    double b = 0.05;
};

double parse_q(const std::string& q) {
    if (q == "inf" || q == "infinity") return kInf;
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(q, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("--q must be a number or 'inf'");
    }
    if (pos != q.size()) throw std::invalid_argument("--q must be a number or 'inf'");
    return v;
}

ProbeSpec probes(const RunConfig& c) {
    if (!(c.probe_decades > 0.0)) throw std::invalid_argument("--probe-decades must be positive");
    if (!(c.ac_threshold > 0.0)) throw std::invalid_argument("--ac-threshold must be positive");
    return {c.probe_decades, c.ac_threshold};
}

std::filesystem::path out_dir(const RunConfig& c) {
    std::filesystem::path d = c.out.empty() ? "." : c.out;
    std::filesystem::create_directories(d);
    return d;
}

void write_file(const std::filesystem::path& p, const std::string& body) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << body;
    std::cerr << "wrote " << p.string() << '\n';
}

std::shared_ptr<const GridDomain> gallery_grid(const RunConfig& c, DistanceMode mode = DistanceMode::Exact) {
    const auto dom = make_gallery_domain(c.gallery, c.k_max);
    const double h = c.h > 0.0 ? c.h : (dom->dim() == 3 ? 1.0 / 64 : 1.0 / 256);
    RasterOptions o;
    o.distance = mode;
    auto gd = std::make_shared<const GridDomain>(rasterize(dom, h, o));
    for (const auto& w : gd->warnings) std::cerr << "warning: " << w << '\n';
    return gd;
}

int cmd_norm(const RunConfig& c) {
    if (c.gallery.empty() == c.csv.empty()) throw std::invalid_argument("norm needs exactly one of --gallery or --csv");
    const LorentzIndex idx{c.p, parse_q(c.q)};
    idx.validate();
    nlohmann::ordered_json j;
    j["index"] = idx.str();
    SampledFunction f;
    double cap = kInf;
    std::optional<ClosedFormDistribution> cf;
    if (!c.csv.empty()) {
        std::ifstream in(c.csv);
        if (!in) throw std::invalid_argument("cannot open " + c.csv);
        f = read_sampled_csv(in, c.csv);
    } else {
        const auto gd = gallery_grid(c);
        const auto rf = ratio_field(make_field(gd, c.field));
        f = rf.ratio;
        cap = rf.xi_cap;
        cf = closed_form_ratio_distribution(*gd->domain, c.field);
        j["source"] = c.gallery + ", |u|/d with u = " + c.field + ", h = " + format_number(gd->h);
        j["xi_cap"] = cap;
    }
    const double rearranged = lorentz_quasinorm_rearranged(f, idx);
    const double dist = lorentz_quasinorm_distribution(f, idx);
    j["rearranged_form"] = rearranged;
    j["distribution_form"] = dist;
    if (idx.weak() && cap < kInf) j["weak_norm_estimate"] = weak_norm_estimate(f, idx.p, cap);
    if (cf && idx.weak()) j["closed_form_weak_norm"] = closed_form_weak_norm(*cf, idx.p);
    const auto ac = cf ? ac_diagnostic(*cf, idx.p, probes(c)) : ac_diagnostic(f, idx.p, probes(c), cap);
    j["ac"] = nlohmann::ordered_json::parse(to_json(ac));
    if (c.json) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "index              " << idx.str() << '\n';
        if (j.contains("source")) std::cout << "source             " << j["source"].get<std::string>() << '\n';
        std::cout << "rearranged form    " << format_number(rearranged) << '\n';
        std::cout << "distribution form  " << format_number(dist) << '\n';
        if (j.contains("weak_norm_estimate"))
            std::cout << "weak norm estimate " << format_number(j["weak_norm_estimate"].get<double>()) << '\n';
        if (j.contains("closed_form_weak_norm"))
            std::cout << "closed form        " << format_number(j["closed_form_weak_norm"].get<double>()) << '\n';
        std::cout << "AC verdict         " << to_string(ac.verdict) << " (zero " << format_number(ac.limit_at_zero_estimate)
                  << ", infinity " << format_number(ac.limit_at_infinity_estimate) << ")\n";
    }
    if (!c.out.empty()) write_file(out_dir(c) / "norm.json", j.dump(2) + "\n");
    return 0;
}

int cmd_verify(const RunConfig& c) {
    ReproductionConfig rc;
    rc.h = c.h;
    rc.seed = c.seed;
    rc.k_max = c.k_max;
    rc.probes = probes(c);
    std::vector<std::string> only;
    for (const auto& o : c.only) {
        std::stringstream ss(o);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) only.push_back(item);
    }
    const auto results = run_reproductions(rc, only);
    if (c.json)
        std::cout << to_json(results) << '\n';
    else
        std::cout << format_table(results);
    if (!c.out.empty()) write_file(out_dir(c) / "verify.json", to_json(results) + "\n");
    for (const auto& r : results)
        if (!r.pass) return 1;
    return 0;
}

int cmd_profile(const RunConfig& c) {
    if (c.gallery.empty()) throw std::invalid_argument("profile needs --gallery");
    if (c.s.empty()) throw std::invalid_argument("profile needs at least one --s");
    const auto gd = gallery_grid(c);
    std::ostringstream csv;
    csv << "s,witness_perimeter,analytic_bound\n";
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    bool violated = false;
    std::optional<ProfilePoint> last;
    for (double s : c.s) {
        const auto pp = profile_search(gd, s);
        violated = violated || pp.bound_violated;
        csv << format_number(s) << ',' << format_number(pp.witness_perimeter) << ','
            << (pp.analytic_bound ? format_number(*pp.analytic_bound) : "") << '\n';
        arr.push_back({{"s", s},
                       {"witness_perimeter", pp.witness_perimeter},
                       {"grid_perimeter", pp.grid_perimeter},
                       {"witness_measure", pp.witness_measure},
                       {"witness_source", pp.witness_source},
                       {"analytic_bound", pp.analytic_bound ? nlohmann::ordered_json(*pp.analytic_bound) : nullptr},
                       {"bound_violated", pp.bound_violated}});
        last = pp;
    }
    std::cout << (c.json ? arr.dump(2) + "\n" : csv.str());
    if (!c.out.empty()) {
        const auto d = out_dir(c);
        write_file(d / ("profile_" + c.gallery + ".csv"), csv.str());
        if (gd->dim == 2 && last && last->witness) {
            SvgOptions so;
            so.caption = default_caption(*gd->domain) + "; witness for s = " + format_number(last->s) +
                         ", perimeter " + format_number(last->witness_perimeter);
            write_file(d / ("profile_" + c.gallery + ".svg"), render_grid_svg(*gd, last->witness.get(), so));
        }
    }
    return violated ? 1 : 0;
}

int cmd_render(const RunConfig& c) {
    if (c.gallery.empty()) throw std::invalid_argument("render needs --gallery");
    const auto dom = make_gallery_domain(c.gallery, c.k_max);
    const auto d = out_dir(c);
    write_file(d / (c.gallery + ".svg"), render_domain_svg(*dom));
    if (c.h > 0.0 && dom->dim() == 2) {
        const auto gd = gallery_grid(c);
        write_file(d / (c.gallery + "_grid.svg"), render_grid_svg(*gd));
        std::ostringstream g;
        write_grid_csv(g, *gd);
        write_file(d / (c.gallery + "_grid.csv"), g.str());
    }
    if (c.json) std::cout << dom->descriptor().dump(2) << '\n';
    return 0;
}

int cmd_scan(const RunConfig& c) {
    if (c.gallery.empty()) throw std::invalid_argument("scan needs --gallery");
    const auto dom = make_gallery_domain(c.gallery, c.k_max);
    std::vector<Point> pts;
    std::vector<double> radii;
    std::vector<int> labels;
    if (c.gallery == "squares_stack") {
        for (int k = 2; k <= std::min(8, c.k_max); ++k) {
            pts.push_back(squares_gap_point(k));
            radii.push_back(squares_gap_radius(k));
            labels.push_back(k);
        }
    } else {
        pts = dom->boundary_samples(4);
        for (int j = 2; j <= 8; ++j) {
            radii.push_back(std::ldexp(1.0, -j));
            labels.push_back(j);
        }
    }
    const auto rep = ball_portion_scan(*dom, pts, radii, c.b, c.mc, c.seed);
    std::ostringstream t;
    t << (c.gallery == "squares_stack" ? "k" : "j") << ",r,x,y,ratio,std_error\n";
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const BallPortionProbe* best = nullptr;
        for (const auto& p : rep.probes)
            if (p.r == radii[i] && (!best || p.ratio < best->ratio)) best = &p;
        if (!best) continue;
        t << labels[i] << ',' << format_number(best->r) << ',' << format_number(best->x[0]) << ','
          << format_number(best->x.size() > 1 ? best->x[1] : 0.0) << ',' << format_number(best->ratio) << ','
          << format_number(best->std_error) << '\n';
    }
    if (c.json) {
        nlohmann::ordered_json j;
        j["verdict"] = to_string(rep.verdict);
        j["infimum_estimate"] = rep.infimum_estimate;
        auto w = nlohmann::ordered_json::array();
        for (const auto& p : rep.witnesses) w.push_back({{"x", p.x}, {"r", p.r}, {"ratio", p.ratio}, {"std_error", p.std_error}});
        j["witnesses"] = w;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << to_string(rep.verdict) << " (infimum estimate " << format_number(rep.infimum_estimate) << ")\n"
                  << t.str();
    }
    if (!c.out.empty()) write_file(out_dir(c) / ("scan_" + c.gallery + ".csv"), t.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sobtrace: Lorentz quasinorms, domain geometry and zero-trace diagnostics"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);
    RunConfig c;

    auto common = [&c](CLI::App* s) {
        s->add_option("--h", c.h, "grid resolution (default 2^-8, 2^-6 in 3-D)")->check(CLI::PositiveNumber);
        s->add_option("--kmax", c.k_max, "truncation depth of infinite constructions")->check(CLI::Range(1, 40));
        s->add_flag("--json", c.json, "machine-readable output");
        s->add_option("--out", c.out, "output directory for artifacts");
    };
    auto probe_opts = [&c](CLI::App* s) {
        s->add_option("--probe-decades", c.probe_decades, "AC probe range in decades");
        s->add_option("--ac-threshold", c.ac_threshold, "AC threshold relative to the weak norm");
    };

    auto* norm = app.add_subcommand("norm", "Lorentz quasinorm and AC report of a sampled function or a gallery field");
    norm->add_option("--gallery", c.gallery, "gallery domain tag");
    norm->add_option("--csv", c.csv, "SampledFunction CSV (value,measure)");
    norm->add_option("--field", c.field, "field on the gallery domain: inv_d, one, d, hardy_ratio, bump");
    norm->add_option("--p", c.p, "Lorentz p");
    norm->add_option("--q", c.q, "Lorentz q (number or inf)");
    common(norm);
    probe_opts(norm);

    auto* verify = app.add_subcommand("verify", "run the reproduction battery");
    verify->add_option("--only", c.only, "reproduction ids (repeatable or comma separated)");
    verify->add_option("--seed", c.seed, "random seed");
    common(verify);
    probe_opts(verify);

    auto* profile = app.add_subcommand("profile", "isoperimetric profile search");
    profile->add_option("--gallery", c.gallery, "gallery domain tag")->required();
    profile->add_option("--s", c.s, "measure levels")->required();
    common(profile);

    auto* render = app.add_subcommand("render", "SVG line art of a gallery domain");
    render->add_option("--gallery", c.gallery, "gallery domain tag")->required();
    common(render);

    auto* scan = app.add_subcommand("scan", "outer ball portion scan");
    scan->add_option("--gallery", c.gallery, "gallery domain tag")->required();
    scan->add_option("--seed", c.seed, "random seed");
    scan->add_option("--mc", c.mc, "Monte Carlo samples per probe")->check(CLI::Range(std::size_t{100}, std::size_t{100000000}));
    scan->add_option("--b", c.b, "ball portion threshold")->check(CLI::PositiveNumber);
    common(scan);

    CLI11_PARSE(app, argc, argv);
    try {
        if (norm->parsed()) return cmd_norm(c);
        if (verify->parsed()) return cmd_verify(c);
        if (profile->parsed()) return cmd_profile(c);
        if (render->parsed()) return cmd_render(c);
        if (scan->parsed()) return cmd_scan(c);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
