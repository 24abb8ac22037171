#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json_io.hpp"
#include "qtrank/decompose.hpp"
#include "qtrank/error.hpp"
#include "qtrank/oracle.hpp"
#include "qtrank/spectral.hpp"

namespace qtrank::cli {

namespace {

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Parse:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::UnsupportedShape:
        case ErrorKind::NonSquare:
        case ErrorKind::PreconditionViolated:
            return InputError;
        default:
            return AlgorithmError;
    }
}

Dims parse_shape(const std::string& s) {
    Dims d{};
    char x1 = 0, x2 = 0;
    std::istringstream in(s);
    if (!(in >> d[0] >> x1 >> d[1] >> x2 >> d[2]) || x1 != 'x' || x2 != 'x' || in.peek() != EOF)
        throw Error(ErrorKind::Parse, "shape must look like 2x3x2, got '" + s + "'");
    for (int n : d)
        if (n < 1) throw Error(ErrorKind::Parse, "shape dimensions must be positive");
    return d;
}

double parse_tol(const std::string& s, const char* source) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
        throw Error(ErrorKind::Parse, std::string(source) + " must be a positive number, got '" + s + "'");
    return v;
}

// Sends data to --out when given, to stdout otherwise.
void emit(const CliConfig& cfg, std::ostream& out, const std::string& data) {
    if (cfg.out_path) {
        std::ofstream f(*cfg.out_path, std::ios::binary);
        if (!f) throw Error(ErrorKind::Parse, "cannot write '" + *cfg.out_path + "'");
        f << data << '\n';
    } else {
        out << data << '\n';
    }
}

std::string human(const SimpleTensor& s) {
    std::ostringstream os;
    auto vec = [&](const HVector& v) {
        os << "(";
        for (std::size_t n = 0; n < v.size(); ++n) os << (n ? ", " : "") << v[n];
        os << ")";
    };
    vec(s.a);
    os << " x ";
    vec(s.b);
    os << " x ";
    vec(s.c);
    return os.str();
}

int cmd_decompose(const CliConfig& cfg, std::ostream& out) {
    const Tensor3 t = io::parse_tensor(io::read_input(cfg.in_path));
    DecomposeOptions opts;
    opts.tol = cfg.tol;
    opts.seed = cfg.seed;
    const DecomposeOutcome r = dispatch(t, opts);
    const VerifyResult v = verify(t, r.decomposition, cfg.tol.verify);
    const bool ok = v.ok && int(r.decomposition.size()) <= r.bound;
    if (cfg.json) {
        std::string s = io::to_json(r.decomposition);
        s.pop_back();   // reopen the object to add the summary fields
        s += ",\"bound\":" + std::to_string(r.bound) + ",\"residual\":" + io::number(v.residual) +
             ",\"path\":\"" + to_string(r.path) + "\",\"attempts\":" + std::to_string(r.attempts) +
             ",\"ok\":" + (ok ? "true" : "false") + "}";
        if (cfg.out_path) {
            emit(cfg, out, io::to_json(r.decomposition));
            out << s << '\n';
        } else {
            emit(cfg, out, s);
        }
    } else {
        if (cfg.out_path) emit(cfg, out, io::to_json(r.decomposition));
        out << "shape     " << dims_string(t.dims()) << '\n'
            << "bound     " << r.bound << '\n'
            << "terms     " << r.decomposition.size() << '\n'
            << "residual  " << std::setprecision(3) << v.residual << '\n'
            << "path      " << to_string(r.path) << '\n';
        if (!cfg.out_path)
            for (const SimpleTensor& s : r.decomposition.terms) out << "  " << human(s) << '\n';
    }
    return ok ? Ok : CheckFailed;
}

int cmd_cert(const CliConfig& cfg, std::ostream& out) {
    const Tensor3 t = io::parse_tensor(io::read_input(cfg.in_path));
    if (t.n1() != t.n3())
        throw Error(ErrorKind::DimensionMismatch, "certificate needs an n x p x n tensor, got " + dims_string(t.dims()));
    const RankCertificate c = rank_certificate_square(t, cfg.tol, cfg.seed);
    if (cfg.json) {
        std::string s = "{\"verdict\":\"" + std::string(to_string(c.verdict)) + "\",\"n\":" + std::to_string(c.n);
        if (c.decomposition) s += ",\"decomposition\":" + io::to_json(*c.decomposition);
        s += ",\"reason\":" + io::quoted(c.reason) + "}";
        emit(cfg, out, s);
    } else {
        out << to_string(c.verdict) << " (n = " << c.n << ")";
        if (!c.reason.empty()) out << ": " << c.reason;
        out << '\n';
        if (c.decomposition)
            for (const SimpleTensor& s : c.decomposition->terms) out << "  " << human(s) << '\n';
    }
    return Ok;
}

int cmd_adjoint(const CliConfig& cfg, std::ostream& out) {
    const HMatrix a = io::parse_matrix(io::read_input(cfg.in_path));
    const CMatrix c = chi_adjoint(a);
    if (cfg.json) {
        emit(cfg, out, io::to_json(c));
    } else {
        std::ostringstream os;
        for (int r = 0; r < c.rows(); ++r) {
            for (int k = 0; k < c.cols(); ++k) os << (k ? "  " : "") << c(r, k);
            os << '\n';
        }
        out << os.str();
    }
    return Ok;
}

int cmd_diag(const CliConfig& cfg, std::ostream& out) {
    const HMatrix a = io::parse_matrix(io::read_input(cfg.in_path));
    if (!a.square()) throw Error(ErrorKind::NonSquare, "diag needs a square matrix");
    const DiagonalizabilityReport r = is_diagonalizable(a, cfg.tol);
    const std::optional<Diagonalization> dg = r.diagonalizable ? diagonalize(a, cfg.tol) : std::nullopt;
    if (cfg.json) {
        std::string s = std::string("{\"diagonalizable\":") + (r.diagonalizable ? "true" : "false") + ",\"eigenvalues\":[";
        for (std::size_t n = 0; n < r.witness.eigenvalues.size(); ++n) {
            const Complex z = r.witness.eigenvalues[n];
            s += (n ? ",[" : "[") + io::number(z.real()) + "," + io::number(z.imag()) + "]";
        }
        s += "],\"clusters\":[";
        for (std::size_t n = 0; n < r.witness.clusters.size(); ++n) {
            const EigenCluster& c = r.witness.clusters[n];
            s += (n ? ",{" : "{") + std::string("\"value\":[") + io::number(c.value.real()) + "," +
                 io::number(c.value.imag()) + "],\"algebraic\":" + std::to_string(c.algebraic) +
                 ",\"geometric\":" + std::to_string(c.geometric) + "}";
        }
        s += "]";
        if (dg) s += ",\"p\":" + io::to_json(dg->p) + ",\"diagonal\":" + io::to_json(dg->diagonal);
        emit(cfg, out, s + "}");
    } else {
        out << (r.diagonalizable ? "diagonalizable" : "not diagonalizable") << '\n';
        for (const EigenCluster& c : r.witness.clusters)
            out << "  " << c.value << "  algebraic " << c.algebraic << "  geometric " << c.geometric << '\n';
        if (dg)
            for (std::size_t n = 0; n < dg->diagonal.size(); ++n) out << "  d" << n << " = " << dg->diagonal[n] << '\n';
    }
    return Ok;
}

int cmd_verify(const CliConfig& cfg, std::ostream& out) {
    const Tensor3 t = io::parse_tensor(io::read_input(cfg.in_path));
    const Decomposition d = io::parse_decomposition(io::read_input(cfg.in_path2));
    const VerifyResult v = verify(t, d, cfg.tol.verify);
    if (cfg.json)
        emit(cfg, out, "{\"residual\":" + io::number(v.residual) + ",\"terms\":" + std::to_string(d.size()) +
                           ",\"ok\":" + (v.ok ? "true" : "false") + "}");
    else
        out << (v.ok ? "ok" : "FAILED") << "  residual " << std::setprecision(3) << v.residual << "  terms "
            << d.size() << '\n';
    return v.ok ? Ok : CheckFailed;
}

int cmd_random(const CliConfig& cfg, const Dims& shape, Distribution dist, std::ostream& out) {
    shape_bound(shape);
    emit(cfg, out, io::to_json(random_tensor(shape, cfg.seed, dist)));
    return Ok;
}

int cmd_suite(const CliConfig& cfg, const Dims& shape, int cases, Distribution dist, std::ostream& out) {
    if (cases < 0) throw Error(ErrorKind::Parse, "--cases must be nonnegative");
    const SuiteReport r = run_suite(shape, cases, cfg.seed, cfg.tol.verify, dist);
    if (cfg.json) {
        emit(cfg, out, io::to_json(r));
    } else {
        out << "shape         " << dims_string(r.shape) << '\n'
            << "cases         " << r.cases << '\n'
            << "bound         " << r.bound << '\n'
            << "max terms     " << r.max_terms << '\n'
            << "max residual  " << std::setprecision(3) << r.max_residual << '\n'
            << "retried       " << r.retried << '\n';
        for (int p = 0; p < decompose_path_count; ++p)
            if (r.path_counts[p]) out << "  " << std::left << std::setw(24) << to_string(DecomposePath(p)) << r.path_counts[p] << '\n';
        out << "failures      " << r.failures.size() << '\n';
        for (std::uint64_t s : r.failures) out << "  seed " << s << '\n';
    }
    return r.ok() ? Ok : CheckFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"qtrank: constructive rank decompositions of small quaternion tensors"};
    app.require_subcommand(1);

    CliConfig cfg;
    std::string tol_flag, shape_flag = "2x2x2", dist_flag = "uniform";
    int cases = 100;
    std::string out_flag;

    auto common = [&](CLI::App* s) {
        s->add_option("--tol", tol_flag, "verification tolerance (default 1e-7, or QTRANK_TOL)");
        s->add_option("--seed", cfg.seed, "random seed");
        s->add_flag("--json", cfg.json, "machine-readable output");
        s->add_option("--out", out_flag, "write data to this file");
    };
    CLI::App* dec = app.add_subcommand("decompose", "decompose a tensor within its shape bound");
    CLI::App* cert = app.add_subcommand("cert", "rank certificate for an n x p x n tensor");
    CLI::App* adj = app.add_subcommand("adjoint", "complex adjoint of a quaternion matrix");
    CLI::App* diag = app.add_subcommand("diag", "diagonalizability of a square quaternion matrix");
    CLI::App* ver = app.add_subcommand("verify", "check a decomposition against a tensor");
    CLI::App* rnd = app.add_subcommand("random", "write a random tensor");
    CLI::App* sui = app.add_subcommand("suite", "decompose and verify a batch of random tensors");
    for (CLI::App* s : {dec, cert, adj, diag, ver, rnd, sui}) common(s);
    for (CLI::App* s : {dec, cert, adj, diag}) s->add_option("input", cfg.in_path, "JSON file, - for stdin")->required();
    ver->add_option("tensor", cfg.in_path, "tensor JSON file")->required();
    ver->add_option("decomposition", cfg.in_path2, "decomposition JSON file")->required();
    for (CLI::App* s : {rnd, sui}) {
        s->add_option("--shape", shape_flag, "n1xn2xn3, frontal slices counted by n2");
        s->add_option("--dist", dist_flag, "uniform | unit | complex | real");
    }
    sui->add_option("--cases", cases, "number of cases");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Ok : InputError;
    }

    try {
        if (const char* env = std::getenv("QTRANK_TOL"); env && *env) cfg.tol.verify = parse_tol(env, "QTRANK_TOL");
        if (!tol_flag.empty()) cfg.tol.verify = parse_tol(tol_flag, "--tol");
        if (!out_flag.empty()) cfg.out_path = out_flag;

        if (*dec) return cmd_decompose(cfg, out);
        if (*cert) return cmd_cert(cfg, out);
        if (*adj) return cmd_adjoint(cfg, out);
        if (*diag) return cmd_diag(cfg, out);
        if (*ver) return cmd_verify(cfg, out);
        const Dims shape = parse_shape(shape_flag);
        const Distribution dist = parse_distribution(dist_flag);
        if (*rnd) return cmd_random(cfg, shape, dist, out);
        return cmd_suite(cfg, shape, cases, dist, out);
    } catch (const Error& e) {
        err << "qtrank: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "qtrank: " << e.what() << '\n';
        return AlgorithmError;
    }
}

}  // namespace qtrank::cli
