// Command-line front end for the ntheight library.
//
// Subcommands: psi, factor, height, search, aux build, aux verify-drop,
// bound, multiplace, zero-count.  Reports are emitted as CSV (the library's
// own deterministic serialization) or JSON; file formats are versioned with
// a "schema" field.  Exit codes: 0 success, 2 configuration problem,
// 3 precision exhausted, 4 a cap or budget was exceeded, 1 anything else.

#include <CLI11.hpp>
#include <json.hpp>
#include <ntheight/ntheight.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;
using namespace ntheight;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out_dir;
    std::optional<unsigned long long> seed;
    long precision = 128;
    std::string format = "csv";
};

// --- small parsing helpers -----------------------------------------------------

BigRational parse_rat(const std::string& s) {
    try {
        BigRational v(s, 10);
        v.canonicalize();
        return v;
    } catch (const std::exception&) {
        raise(errc::config_error, "not a rational number: '" + s + "'");
    }
}

BigInt parse_int(const std::string& s) {
    try {
        return BigInt(s, 10);
    } catch (const std::exception&) {
        raise(errc::config_error, "not an integer: '" + s + "'");
    }
}

std::string rat_str(const BigRational& v) {
    return v.get_den() == 1 ? v.get_num().get_str() : v.get_str();
}

json rat_json(const BigRational& v) { return rat_str(v); }

BigRational rat_from_json(const json& j, const std::string& where) {
    if (j.is_string()) return parse_rat(j.get<std::string>());
    if (j.is_number_integer()) return BigRational(static_cast<long>(j.get<long long>()));
    raise(errc::config_error, where + ": expected a rational as a string or integer");
}

BigInt int_from_json(const json& j, const std::string& where) {
    if (j.is_string()) return parse_int(j.get<std::string>());
    if (j.is_number_integer()) return BigInt(static_cast<long>(j.get<long long>()));
    raise(errc::config_error, where + ": expected an integer");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::config_error, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        raise(errc::config_error, path + ": " + e.what());
    }
}

// polynomials travel as integer coefficient arrays, constant term first
ZPoly poly_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        raise(errc::config_error, where + ": expected a nonempty coefficient array");
    std::vector<BigInt> c;
    for (const auto& v : j) c.push_back(int_from_json(v, where));
    return ZPoly(std::move(c));
}

json poly_to_json(const ZPoly& f) {
    json a = json::array();
    for (const BigInt& c : f.coeffs()) a.push_back(c.get_str());
    return a;
}

NfPtr field_from_json(const json& j, long precision) {
    ZPoly f = poly_from_json(j, "field");
    if (f.degree() == 1) return nf_rationals(precision);
    return nf_create(f, precision);
}

NfElement nf_from_json(const NfPtr& K, const json& j, const std::string& where) {
    if (j.is_array()) {
        std::vector<BigRational> c;
        for (const auto& v : j) c.push_back(rat_from_json(v, where));
        while (static_cast<long>(c.size()) < K->degree()) c.emplace_back(0);
        return NfElement(K, std::move(c));
    }
    return nf_from_rational(K, rat_from_json(j, where));
}

json nf_to_json(const NfElement& a) {
    if (a.K->is_rational()) return rat_json(a.c.at(0));
    json out = json::array();
    for (const BigRational& v : a.c) out.push_back(rat_json(v));
    return out;
}

// curves travel as {field, a, b}; the field entry may be omitted for Q
CurvePtr curve_from_json(const json& j, long precision) {
    if (!j.is_object() || !j.contains("a") || !j.contains("b"))
        raise(errc::config_error, "curve: expected an object with keys a, b");
    NfPtr K = j.contains("field") ? field_from_json(j.at("field"), precision)
                                  : nf_rationals(precision);
    return curve(K, nf_from_json(K, j.at("a"), "curve a"), nf_from_json(K, j.at("b"), "curve b"));
}

json curve_to_json(const CurvePtr& E) {
    json out;
    out["field"] = poly_to_json(E->base->defining_poly());
    out["a"] = nf_to_json(E->a);
    out["b"] = nf_to_json(E->b);
    return out;
}

// points travel as [x, y] coordinate pairs or the string "O"
CurvePoint point_from_json(const CurvePtr& E, const json& j) {
    if (j.is_string() && j.get<std::string>() == "O") return point_infinity(E);
    if (!j.is_array() || j.size() != 2)
        raise(errc::config_error, "point: expected [x, y] or \"O\"");
    return point(E, nf_from_json(E->base, j.at(0), "point x"),
                 nf_from_json(E->base, j.at(1), "point y"));
}

json point_to_json(const CurvePoint& P) {
    if (P.at_infinity) return "O";
    json out = json::array();
    out.push_back(nf_to_json(P.x));
    out.push_back(nf_to_json(P.y));
    return out;
}

Tower tower_from_json(const json& j, long precision) {
    if (!j.is_object() || int_from_json(j.value("schema", json(0)), "tower schema") != 1)
        raise(errc::config_error, "tower file: expected an object with \"schema\": 1");
    if (!j.contains("levels") || !j.at("levels").is_array() || j.at("levels").empty())
        raise(errc::config_error, "tower file: missing levels");
    Tower T;
    for (const auto& lv : j.at("levels")) {
        ZPoly f = poly_from_json(lv, "tower level");
        T.levels.push_back(f.degree() == 1 ? nf_rationals(precision) : nf_create(f, precision));
    }
    const json& ws = j.value("witnesses", json::array());
    for (size_t i = 0; i < ws.size(); ++i)
        T.witnesses.push_back(nf_from_json(T.levels.at(i + 1), ws.at(i), "tower witness"));
    verify_tower(T);
    return T;
}

json tower_to_json(const Tower& T) {
    json out;
    out["schema"] = 1;
    json levels = json::array();
    for (const NfPtr& K : T.levels) levels.push_back(poly_to_json(K->defining_poly()));
    out["levels"] = levels;
    json ws = json::array();
    for (const NfElement& w : T.witnesses) {
        json coords = json::array();
        for (const BigRational& v : w.c) coords.push_back(rat_json(v));
        ws.push_back(coords);
    }
    out["witnesses"] = ws;
    return out;
}

// auxiliary sections round-trip through the versioned JSON fixture format
json aux_to_json(const AuxSection& F) {
    json out;
    out["schema"] = 1;
    out["curve"] = curve_to_json(F.E);
    out["L"] = F.L;
    out["N"] = F.N;
    out["T0"] = F.T0;
    json cs = json::array();
    for (const BigInt& c : F.coeffs) cs.push_back(c.get_str());
    out["coeffs"] = cs;
    out["denominator"] = F.denominator.get_str();
    out["height_of_F"] = F.height_of_F;
    out["bound_height"] = F.bound_height;
    out["kernel_margin"] = F.kernel_margin;
    out["structural_tf"] = F.structural_tf;
    return out;
}

AuxSection aux_from_json(const json& j, long precision) {
    if (!j.is_object() || int_from_json(j.value("schema", json(0)), "section schema") != 1)
        raise(errc::config_error, "section file: expected an object with \"schema\": 1");
    for (const char* key : {"curve", "L", "N", "T0", "coeffs", "denominator"})
        if (!j.contains(key)) raise(errc::config_error, std::string("section file: missing ") + key);
    AuxSection F;
    F.E = curve_from_json(j.at("curve"), precision);
    F.L = j.at("L").get<long>();
    F.N = j.at("N").get<long>();
    F.T0 = j.at("T0").get<long>();
    for (const auto& c : j.at("coeffs")) F.coeffs.push_back(int_from_json(c, "section coeffs"));
    F.denominator = int_from_json(j.at("denominator"), "section denominator");
    F.height_of_F = j.value("height_of_F", 0.0);
    F.bound_height = j.value("bound_height", 0.0);
    F.kernel_margin = j.value("kernel_margin", 0L);
    F.structural_tf = j.value("structural_tf", 0L);
    return F;
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) raise(errc::config_error, "config: expected a JSON object");
    static const std::set<std::string> known = {
        "schema", "a",  "b",  "p",  "tower_degrees", "psi_qs",      "norm_cap",
        "naive_cap",    "hhat_cap", "budget", "L",   "N",           "T0",
        "epsilon",      "s_threshold",        "seed"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) raise(errc::config_error, "config: unknown key '" + key + "'");
    ExperimentConfig c;
    c.schema = j.contains("schema") ? j.at("schema").get<long>() : 0;
    if (j.contains("a")) c.a = rat_from_json(j.at("a"), "config a");
    if (j.contains("b")) c.b = rat_from_json(j.at("b"), "config b");
    if (j.contains("p")) c.p = int_from_json(j.at("p"), "config p");
    if (j.contains("tower_degrees")) {
        c.tower_degrees.clear();
        for (const auto& d : j.at("tower_degrees")) c.tower_degrees.push_back(d.get<long>());
    }
    if (j.contains("psi_qs")) {
        c.psi_qs.clear();
        for (const auto& q : j.at("psi_qs")) c.psi_qs.push_back(int_from_json(q, "config psi_qs"));
    }
    if (j.contains("norm_cap")) c.norm_cap = j.at("norm_cap").get<double>();
    if (j.contains("naive_cap")) c.naive_cap = j.at("naive_cap").get<double>();
    if (j.contains("hhat_cap")) c.hhat_cap = j.at("hhat_cap").get<double>();
    if (j.contains("budget")) c.budget = j.at("budget").get<long>();
    if (j.contains("L")) c.L = j.at("L").get<long>();
    if (j.contains("N")) c.N = j.at("N").get<long>();
    if (j.contains("T0")) c.T0 = j.at("T0").get<long>();
    if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
    if (j.contains("s_threshold")) c.s_threshold = j.at("s_threshold").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<unsigned long long>();
    validate_config(c);
    return c;
}

// --- output plumbing -------------------------------------------------------------

void write_output(const GlobalOpts& g, const std::string& stem, const std::string& ext,
                  const std::string& body) {
    if (g.out_dir.empty()) {
        std::cout << body;
        if (!body.empty() && body.back() != '\n') std::cout << '\n';
        return;
    }
    std::filesystem::create_directories(g.out_dir);
    std::filesystem::path p = std::filesystem::path(g.out_dir) / (stem + "." + ext);
    std::ofstream out(p);
    if (!out) raise(errc::config_error, "cannot write " + p.string());
    out << body;
    std::cerr << "wrote " << p.string() << "\n";
}

json report_meta(const std::string& kind, const ExperimentConfig& cfg, const std::string& hash) {
    json m;
    m["schema"] = 1;
    m["kind"] = kind;
    m["version"] = kLibraryVersion;
    m["config"] = config_canonical(cfg);
    m["config_hash"] = hash;
    m["seed"] = cfg.seed;
    return m;
}

json height_json(const HeightValue& h) {
    json out;
    out["value"] = h.value;
    out["error"] = h.error;
    out["provenance"] = h.error == 0 ? "exact" : "enclosed";
    return out;
}

// --- subcommand bodies -------------------------------------------------------------

ExperimentConfig load_config(const GlobalOpts& g, bool required = true) {
    if (g.config_path.empty()) {
        if (required) raise(errc::config_error, "this subcommand needs --config <file>");
        ExperimentConfig c;
        if (g.seed) c.seed = *g.seed;
        return c;
    }
    ExperimentConfig c = config_from_json(read_json_file(g.config_path));
    if (g.seed) c.seed = *g.seed;
    return c;
}

int cmd_psi(const GlobalOpts& g, const std::string& tower_path, const std::string& emit_tower,
            const std::vector<std::string>& qs) {
    ExperimentConfig cfg = load_config(g, tower_path.empty());
    if (!qs.empty()) {
        cfg.psi_qs.clear();
        for (const std::string& q : qs) cfg.psi_qs.push_back(parse_int(q));
    }
    PsiReport rep;
    if (!tower_path.empty()) {
        Tower T = tower_from_json(read_json_file(tower_path), g.precision);
        require(!cfg.psi_qs.empty(), errc::config_error, "psi needs at least one --q value");
        rep.cfg = cfg;
        rep.cfg.tower_degrees.clear();
        for (const NfPtr& K : T.levels) rep.cfg.tower_degrees.push_back(K->degree());
        rep.hash = config_hash(rep.cfg);
        for (const BigInt& q : cfg.psi_qs) {
            PsiEstimate est = psi_estimate(T, q);
            for (size_t i = 0; i < est.ratios.size(); ++i)
                rep.rows.push_back({static_cast<long>(i), T.levels[i]->degree(), q, est.ratios[i]});
        }
    } else {
        rep = run_psi_report(cfg);
        if (!emit_tower.empty()) {
            Tower T = build_totally_padic_tower(cfg.p, cfg.tower_degrees);
            std::ofstream out(emit_tower);
            if (!out) raise(errc::config_error, "cannot write " + emit_tower);
            out << tower_to_json(T).dump(2) << "\n";
            std::cerr << "wrote " << emit_tower << "\n";
        }
    }
    if (g.format == "csv") {
        write_output(g, "psi", "csv", rep.to_csv());
    } else {
        json out;
        out["meta"] = report_meta("psi_report", rep.cfg, rep.hash);
        json rows = json::array();
        for (const auto& r : rep.rows) {
            json row;
            row["level"] = r.level;
            row["degree"] = r.degree;
            row["q"] = r.q.get_str();
            row["ratio"] = rat_str(r.ratio);
            row["provenance"] = "exact";
            rows.push_back(row);
        }
        out["rows"] = rows;
        write_output(g, "psi", "json", out.dump(2));
    }
    return 0;
}

int cmd_factor(const GlobalOpts& g, const std::string& n_str) {
    BigInt n = parse_int(n_str);
    auto fac = factor_int(n);
    if (g.format == "csv") {
        std::ostringstream o;
        o << "prime,exponent\n";
        for (const auto& [p, e] : fac) o << p.get_str() << ',' << e << "\n";
        write_output(g, "factor", "csv", o.str());
    } else {
        json out;
        out["n"] = n.get_str();
        json rows = json::array();
        for (const auto& [p, e] : fac) {
            json row;
            row["prime"] = p.get_str();
            row["exponent"] = e;
            rows.push_back(row);
        }
        out["factors"] = rows;
        write_output(g, "factor", "json", out.dump(2));
    }
    return 0;
}

int cmd_height(const GlobalOpts& g, const std::string& a, const std::string& b,
               const std::string& x, const std::string& y, double tol) {
    std::optional<CurvePoint> P;
    if (!g.config_path.empty()) {
        json j = read_json_file(g.config_path);
        if (!j.contains("curve") || !j.contains("point"))
            raise(errc::config_error, "height config: expected keys curve, point");
        CurvePtr E = curve_from_json(j.at("curve"), g.precision);
        P = point_from_json(E, j.at("point"));
        if (j.contains("tol")) tol = j.at("tol").get<double>();
    } else {
        require(!a.empty() && !b.empty() && !x.empty() && !y.empty(), errc::config_error,
                "height needs --a --b --x --y (or --config)");
        CurvePtr E = curve_q(parse_rat(a), parse_rat(b));
        P = point_q(E, parse_rat(x), parse_rat(y));
    }
    TorsionCertificate cert = is_torsion(*P);
    HeightValue h = canonical_height(*P, tol);
    if (g.format == "csv") {
        std::ostringstream o;
        o << "value,error,iterations,torsion\n";
        o << detail::fmt_g(h.value) << ',' << detail::fmt_g(h.error) << ',' << h.iterations << ','
          << (cert.torsion ? "true" : "false") << "\n";
        write_output(g, "height", "csv", o.str());
    } else {
        json out = height_json(h);
        out["iterations"] = h.iterations;
        out["torsion"] = static_cast<bool>(cert);
        out["point"] = point_to_json(*P);
        write_output(g, "height", "json", out.dump(2));
    }
    return 0;
}

int cmd_search(const GlobalOpts& g, const std::string& a, const std::string& b, double naive_cap,
               double hhat_cap, long budget) {
    CurvePtr E;
    NfPtr K;
    if (!g.config_path.empty()) {
        json j = read_json_file(g.config_path);
        if (!j.contains("curve")) raise(errc::config_error, "search config: expected key curve");
        E = curve_from_json(j.at("curve"), g.precision);
        K = E->base;
        if (j.contains("naive_cap")) naive_cap = j.at("naive_cap").get<double>();
        if (j.contains("hhat_cap")) hhat_cap = j.at("hhat_cap").get<double>();
        if (j.contains("budget")) budget = j.at("budget").get<long>();
    } else {
        require(!a.empty() && !b.empty(), errc::config_error,
                "search needs --a --b (or --config)");
        E = curve_q(parse_rat(a), parse_rat(b));
        K = E->base;
    }
    SearchRecord rec = search_small_points(E, K, naive_cap, hhat_cap, budget);

    auto point_strings = [](const CurvePoint& P) {
        std::pair<std::string, std::string> out;
        if (P.at_infinity) return std::pair<std::string, std::string>{"O", "O"};
        out.first = P.E->base->is_rational() ? rat_str(P.x.rational_value()) : nf_to_string(P.x);
        out.second = P.E->base->is_rational() ? rat_str(P.y.rational_value()) : nf_to_string(P.y);
        return out;
    };

    if (g.format == "csv") {
        std::ostringstream o;
        o << "# kind,search_record\n";
        o << "# version," << kLibraryVersion << "\n";
        o << "# naive_cap," << detail::fmt_g(naive_cap) << "\n";
        o << "x,y,naive_h,hhat,hhat_err,torsion\n";
        for (const CurvePoint& t : rec.torsion_found) {
            auto [xs, ys] = point_strings(t);
            o << detail::csv_safe(xs) << ',' << detail::csv_safe(ys) << ','
              << detail::fmt_g(naive_height(t)) << ",0,0,true\n";
        }
        for (const auto& [pt, hv] : rec.kept) {
            auto [xs, ys] = point_strings(pt);
            o << detail::csv_safe(xs) << ',' << detail::csv_safe(ys) << ','
              << detail::fmt_g(naive_height(pt)) << ',' << detail::fmt_g(hv.value) << ','
              << detail::fmt_g(hv.error) << ",false\n";
        }
        write_output(g, "search", "csv", o.str());
    } else {
        json out;
        out["kind"] = "search_record";
        out["version"] = kLibraryVersion;
        out["points_found"] = rec.points_found;
        json rows = json::array();
        for (const CurvePoint& t : rec.torsion_found) {
            json row;
            row["point"] = point_to_json(t);
            row["naive_h"] = naive_height(t);
            row["hhat"] = 0;
            row["hhat_err"] = 0;
            row["torsion"] = true;
            rows.push_back(row);
        }
        for (const auto& [pt, hv] : rec.kept) {
            json row;
            row["point"] = point_to_json(pt);
            row["naive_h"] = naive_height(pt);
            row["hhat"] = hv.value;
            row["hhat_err"] = hv.error;
            row["torsion"] = false;
            rows.push_back(row);
        }
        out["rows"] = rows;
        write_output(g, "search", "json", out.dump(2));
    }
    return 0;
}

int cmd_aux_build(const GlobalOpts& g, const std::string& a, const std::string& b, long N, long L,
                  long T0) {
    CurvePtr E;
    if (!g.config_path.empty()) {
        ExperimentConfig cfg = load_config(g);
        E = curve_q(cfg.a, cfg.b);
        N = cfg.N;
        L = cfg.L;
        T0 = cfg.T0;
    } else {
        require(!a.empty() && !b.empty(), errc::config_error,
                "aux build needs --a --b (or --config)");
        E = curve_q(parse_rat(a), parse_rat(b));
    }
    AuxSection F = build_aux_section(E, N, L, T0);
    write_output(g, "aux", "json", aux_to_json(F).dump(2));
    return 0;
}

int cmd_aux_verify_drop(const GlobalOpts& g, const std::string& section_path,
                        const std::string& p_str, const std::string& x, const std::string& y,
                        bool do_amplify) {
    require(!section_path.empty(), errc::config_error, "aux verify-drop needs --section <file>");
    AuxSection F = aux_from_json(read_json_file(section_path), g.precision);
    require(!x.empty() && !y.empty(), errc::config_error, "aux verify-drop needs --x --y");
    CurvePoint P = point_q(F.E, parse_rat(x), parse_rat(y));
    BigInt p = parse_int(p_str);
    std::vector<PrimeIdeal> ws = dedekind_factor(F.E->base, p);
    require(!ws.empty(), errc::bad_prime, "no place above " + p.get_str());
    if (do_amplify) P = amplify(P, ws.front()).Q;
    DropReport d = verify_drop(F, P, ws.front());
    if (g.format == "csv") {
        std::ostringstream o;
        o << "T0,Tf,m,valuation,rhs,residue_degree,holds,strong_rhs,strong_holds\n";
        o << d.T0 << ',' << d.Tf << ',' << d.m << ',' << d.valuation << ',' << d.rhs << ','
          << d.residue_degree << ',' << (d.holds ? "true" : "false") << ',' << d.strong_rhs << ','
          << (d.strong_holds ? "true" : "false") << "\n";
        write_output(g, "verify-drop", "csv", o.str());
    } else {
        json out;
        out["T0"] = d.T0;
        out["Tf"] = d.Tf;
        out["m"] = d.m;
        out["valuation"] = d.valuation;
        out["rhs"] = d.rhs;
        out["residue_degree"] = d.residue_degree;
        out["holds"] = d.holds;
        out["strong_rhs"] = d.strong_rhs;
        out["strong_holds"] = d.strong_holds;
        write_output(g, "verify-drop", "json", out.dump(2));
    }
    return 0;
}

int cmd_bound(const GlobalOpts& g) {
    BoundReport rep = run_bound_experiment(load_config(g));
    if (g.format == "csv") {
        write_output(g, "bound", "csv", rep.to_csv());
        return 0;
    }
    json out;
    out["meta"] = report_meta("bound_experiment", rep.cfg, rep.hash);
    out["psi_ratio"] = rat_str(rep.psi_ratio);
    out["epsilon_shape"] = rep.epsilon_shape;
    if (rep.min_hhat) out["min_hhat"] = height_json(*rep.min_hhat);
    out["ratio_certified"] = rep.ratio_certified;
    if (rep.ratio_certified) out["ratio"] = rep.ratio;
    json levels = json::array();
    for (const auto& lv : rep.levels) {
        json row;
        row["level"] = lv.level;
        row["degree"] = lv.degree;
        row["status"] = lv.status;
        row["points_found"] = lv.points_found;
        row["torsion"] = lv.torsion;
        row["undecided"] = lv.undecided;
        if (lv.min_hhat) {
            row["min_hhat"] = height_json(*lv.min_hhat);
            row["min_point"] = lv.min_point;
        }
        row["kernel_places"] = lv.kernel_places;
        row["kernel_orders"] = lv.kernel_orders;
        levels.push_back(row);
    }
    out["levels"] = levels;
    write_output(g, "bound", "json", out.dump(2));
    return 0;
}

int cmd_multiplace(const GlobalOpts& g) {
    MultiplaceReport rep = run_multiplace_experiment(load_config(g));
    if (g.format == "csv") {
        write_output(g, "multiplace", "csv", rep.to_csv());
        return 0;
    }
    json out;
    out["meta"] = report_meta("multiplace_experiment", rep.cfg, rep.hash);
    out["primed_bound_shape"] = rep.primed_bound_shape;
    json rows = json::array();
    for (const auto& r : rep.rows) {
        json row;
        row["level"] = r.level;
        row["label"] = r.label;
        row["point"] = r.point;
        row["phi_over_deg"] = r.phi_over_deg;
        row["phi_terms"] = r.phi_terms;
        row["bench_over_deg"] = r.bench_over_deg;
        row["tf"] = r.tf;
        if (r.ledger == "certified" || r.ledger == "magnitude") row["arch"] = r.arch;
        if (r.ledger == "certified") {
            row["finite"] = r.finite;
            row["closure"] = r.closure;
            row["defect"] = r.defect;
            row["defect_err"] = r.defect_err;
        }
        row["ledger"] = r.ledger;
        row["status"] = r.status;
        rows.push_back(row);
    }
    out["rows"] = rows;
    write_output(g, "multiplace", "json", out.dump(2));
    return 0;
}

int cmd_zero_count(const GlobalOpts& g) {
    ZeroCountReport rep = run_zero_count(load_config(g));
    if (g.format == "csv") {
        write_output(g, "zero-count", "csv", rep.to_csv());
        return 0;
    }
    json out;
    out["meta"] = report_meta("zero_count", rep.cfg, rep.hash);
    out["counted"] = rep.counted;
    out["undecided"] = rep.undecided;
    out["tf_max"] = rep.tf_max;
    out["lhs"] = rep.lhs;
    out["rhs"] = rep.rhs;
    out["violation"] = rep.violation;
    json rows = json::array();
    for (const auto& r : rep.rows) {
        json row;
        row["level"] = r.level;
        row["point"] = r.point;
        row["bucket"] = r.bucket;
        row["kernel"] = r.kernel;
        row["required"] = r.required;
        row["hhat"] = r.hhat;
        row["hhat_err"] = r.hhat_err;
        row["provenance"] = r.provenance;
        row["tf"] = r.tf;
        rows.push_back(row);
    }
    out["rows"] = rows;
    write_output(g, "zero-count", "json", out.dump(2));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale height bounds on elliptic curves over number fields"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON configuration file")->expected(1);
    app.add_option("--out", g.out_dir, "directory for report files (default: stdout)");
    app.add_option("--seed", g.seed, "seed recorded in reports, overrides the config");
    app.add_option("--precision", g.precision, "number-field embedding precision in bits")
        ->check(CLI::Range(32L, 4096L));
    app.add_option("--format", g.format, "report serialization")
        ->check(CLI::IsMember({"json", "csv"}));

    std::string tower_path, emit_tower;
    std::vector<std::string> psi_qs;
    auto* psi = app.add_subcommand("psi", "per-level splitting ratios along a tower");
    psi->add_option("--tower", tower_path, "tower JSON file (default: built from the config)");
    psi->add_option("--emit-tower", emit_tower, "write the config-built tower to this file");
    psi->add_option("--q", psi_qs, "prime power(s) to tabulate");

    std::string factor_n;
    auto* factor = app.add_subcommand("factor", "factor an integer");
    factor->add_option("n", factor_n, "integer to factor")->required();

    std::string h_a, h_b, h_x, h_y;
    double h_tol = 1e-8;
    auto* height = app.add_subcommand("height", "canonical height of a point");
    height->add_option("--a", h_a, "curve coefficient a");
    height->add_option("--b", h_b, "curve coefficient b");
    height->add_option("--x", h_x, "point x coordinate");
    height->add_option("--y", h_y, "point y coordinate");
    height->add_option("--tol", h_tol, "target enclosure width");

    std::string s_a, s_b;
    double s_naive = 2.0, s_hhat = 10.0;
    long s_budget = 2000000;
    auto* search = app.add_subcommand("search", "enumerate small points and their heights");
    search->add_option("--a", s_a, "curve coefficient a");
    search->add_option("--b", s_b, "curve coefficient b");
    search->add_option("--naive-cap", s_naive, "naive height cap");
    search->add_option("--hhat-cap", s_hhat, "canonical height cap");
    search->add_option("--budget", s_budget, "enumeration budget");

    auto* aux = app.add_subcommand("aux", "auxiliary sections");
    aux->require_subcommand(1);
    std::string ab_a, ab_b;
    long ab_N = 2, ab_L = 3, ab_T0 = 8;
    auto* aux_build = aux->add_subcommand("build", "solve the vanishing system");
    aux_build->add_option("--a", ab_a, "curve coefficient a");
    aux_build->add_option("--b", ab_b, "curve coefficient b");
    aux_build->add_option("--N", ab_N, "section index pair (1, N)");
    aux_build->add_option("--L", ab_L, "line bundle parameter");
    aux_build->add_option("--T0", ab_T0, "prescribed vanishing order");

    std::string vd_section, vd_p = "7", vd_x, vd_y;
    bool vd_amplify = false;
    auto* aux_vd = aux->add_subcommand("verify-drop", "certify the valuation drop at a point");
    aux_vd->add_option("--section", vd_section, "aux section JSON file")->required();
    aux_vd->add_option("--p", vd_p, "rational prime under the place");
    aux_vd->add_option("--x", vd_x, "point x coordinate");
    aux_vd->add_option("--y", vd_y, "point y coordinate");
    aux_vd->add_flag("--amplify", vd_amplify, "multiply by the reduced point count first");

    auto* bound = app.add_subcommand("bound", "height lower-bound shape experiment");
    auto* multiplace = app.add_subcommand("multiplace", "multi-place statistic and ledger");
    auto* zero_count = app.add_subcommand("zero-count", "small-point count against the shape");

    // global flags may trail the subcommand name, e.g. `psi --tower t.json --out dir`
    for (CLI::App* sub : {psi, factor, height, search, aux, bound, multiplace, zero_count})
        sub->fallthrough();
    aux_build->fallthrough();
    aux_vd->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (psi->parsed()) return cmd_psi(g, tower_path, emit_tower, psi_qs);
        if (factor->parsed()) return cmd_factor(g, factor_n);
        if (height->parsed()) return cmd_height(g, h_a, h_b, h_x, h_y, h_tol);
        if (search->parsed()) return cmd_search(g, s_a, s_b, s_naive, s_hhat, s_budget);
        if (aux->parsed()) {
            if (aux_build->parsed()) return cmd_aux_build(g, ab_a, ab_b, ab_N, ab_L, ab_T0);
            if (aux_vd->parsed())
                return cmd_aux_verify_drop(g, vd_section, vd_p, vd_x, vd_y, vd_amplify);
        }
        if (bound->parsed()) return cmd_bound(g);
        if (multiplace->parsed()) return cmd_multiplace(g);
        if (zero_count->parsed()) return cmd_zero_count(g);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        switch (e.code()) {
            case errc::config_error:
            case errc::invalid_argument:
                return 2;
            case errc::precision_exhausted:
                return 3;
            case errc::cap_exceeded:
                return 4;
            default:
                return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
