#include "json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "qtrank/error.hpp"

namespace qtrank::io {

using nlohmann::json;

std::string number(double v) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Parse, "cannot write a non-finite number as JSON");
    if (v == 0.0) v = 0.0;   // no "-0"
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quoted(const std::string& s) { return json(s).dump(); }

std::string to_json(const Quaternion& q) {
    return "[" + number(q.w) + "," + number(q.x) + "," + number(q.y) + "," + number(q.z) + "]";
}

std::string to_json(const HVector& v) {
    std::string s = "[";
    for (std::size_t n = 0; n < v.size(); ++n) s += (n ? "," : "") + to_json(v[n]);
    return s + "]";
}

std::string to_json(const HMatrix& m) {
    std::string s = "[";
    for (int r = 0; r < m.rows(); ++r) s += (r ? "," : "") + to_json(m.row(r));
    return s + "]";
}

std::string to_json(const CMatrix& m) {
    std::string s = "[";
    for (int r = 0; r < m.rows(); ++r) {
        s += r ? ",[" : "[";
        for (int c = 0; c < m.cols(); ++c)
            s += (c ? ",[" : "[") + number(m(r, c).real()) + "," + number(m(r, c).imag()) + "]";
        s += "]";
    }
    return s + "]";
}

namespace {

std::string shape_json(const Dims& d) {
    return "[" + std::to_string(d[0]) + "," + std::to_string(d[1]) + "," + std::to_string(d[2]) + "]";
}

}  // namespace

std::string to_json(const Tensor3& t) {
    std::string s = "{\"shape\":" + shape_json(t.dims()) + ",\"entries\":[";
    for (int i = 0; i < t.n1(); ++i) {
        s += i ? ",[" : "[";
        for (int j = 0; j < t.n2(); ++j) {
            s += j ? ",[" : "[";
            for (int k = 0; k < t.n3(); ++k) s += (k ? "," : "") + to_json(t(i, j, k));
            s += "]";
        }
        s += "]";
    }
    return s + "]}";
}

std::string to_json(const Decomposition& d) {
    std::string s = "{\"shape\":" + shape_json(d.dims) + ",\"terms\":[";
    for (std::size_t n = 0; n < d.terms.size(); ++n) {
        const SimpleTensor& t = d.terms[n];
        s += (n ? "," : "") + std::string("{\"a\":") + to_json(t.a) + ",\"b\":" + to_json(t.b) +
             ",\"c\":" + to_json(t.c) + "}";
    }
    return s + "]}";
}

std::string to_json(const SuiteReport& r) {
    std::string s = "{\"shape\":" + shape_json(r.shape);
    s += ",\"cases\":" + std::to_string(r.cases);
    s += ",\"master_seed\":" + std::to_string(r.master_seed);
    s += ",\"tol\":" + number(r.tol);
    s += ",\"dist\":\"" + std::string(to_string(r.dist)) + "\"";
    s += ",\"bound\":" + std::to_string(r.bound);
    s += ",\"max_residual\":" + number(r.max_residual);
    s += ",\"max_terms\":" + std::to_string(r.max_terms);
    s += ",\"retried\":" + std::to_string(r.retried);
    s += ",\"path_counts\":{";
    bool first = true;
    for (int p = 0; p < decompose_path_count; ++p) {
        if (r.path_counts[p] == 0) continue;
        s += (first ? "\"" : ",\"") + std::string(to_string(DecomposePath(p))) + "\":" +
             std::to_string(r.path_counts[p]);
        first = false;
    }
    s += "},\"failures\":[";
    for (std::size_t n = 0; n < r.failures.size(); ++n) s += (n ? "," : "") + std::to_string(r.failures[n]);
    return s + "],\"ok\":" + (r.ok() ? "true" : "false") + "}";
}

namespace {

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, "malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::Parse, where + ": " + what);
}

Quaternion quaternion_from(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_array() || j.size() != 4) bad(where, "expected a number or [w,x,y,z]");
    double c[4];
    for (int n = 0; n < 4; ++n) {
        if (!j[n].is_number()) bad(where, "quaternion components must be numbers");
        c[n] = j[n].get<double>();
        if (!std::isfinite(c[n])) bad(where, "non-finite component");
    }
    return {c[0], c[1], c[2], c[3]};
}

HVector vector_from(const json& j, const std::string& where) {
    if (!j.is_array()) bad(where, "expected an array of quaternions");
    HVector v;
    for (std::size_t n = 0; n < j.size(); ++n) v.push_back(quaternion_from(j[n], where + "[" + std::to_string(n) + "]"));
    return v;
}

Dims shape_from(const json& obj) {
    if (!obj.is_object() || !obj.contains("shape")) bad("document", "expected an object with \"shape\"");
    const json& s = obj["shape"];
    if (!s.is_array() || s.size() != 3) bad("shape", "expected [n1,n2,n3]");
    Dims d;
    for (int n = 0; n < 3; ++n) {
        if (!s[n].is_number_integer() || s[n].get<long long>() < 1) bad("shape", "dimensions must be positive integers");
        d[n] = int(s[n].get<long long>());
    }
    return d;
}

}  // namespace

Quaternion parse_quaternion(const std::string& text) { return quaternion_from(parse_text(text), "quaternion"); }

HMatrix parse_matrix(const std::string& text) {
    const json j = parse_text(text);
    if (!j.is_array() || j.empty()) bad("matrix", "expected a nonempty array of rows");
    const int rows = int(j.size());
    int cols = -1;
    HMatrix m;
    for (int r = 0; r < rows; ++r) {
        const HVector row = vector_from(j[r], "matrix[" + std::to_string(r) + "]");
        if (cols < 0) {
            cols = int(row.size());
            if (cols == 0) bad("matrix", "empty row");
            m = HMatrix(rows, cols);
        } else if (int(row.size()) != cols) {
            bad("matrix[" + std::to_string(r) + "]", "ragged rows");
        }
        for (int c = 0; c < cols; ++c) m(r, c) = row[c];
    }
    return m;
}

Tensor3 parse_tensor(const std::string& text) {
    const json j = parse_text(text);
    const Dims d = shape_from(j);
    if (!j.contains("entries")) bad("document", "missing \"entries\"");
    const json& e = j["entries"];
    Tensor3 t(d);
    if (!e.is_array() || int(e.size()) != d[0]) bad("entries", "expected " + std::to_string(d[0]) + " rows");
    for (int i = 0; i < d[0]; ++i) {
        if (!e[i].is_array() || int(e[i].size()) != d[1]) bad("entries[" + std::to_string(i) + "]", "wrong length");
        for (int k2 = 0; k2 < d[1]; ++k2) {
            const std::string where = "entries[" + std::to_string(i) + "][" + std::to_string(k2) + "]";
            const HVector v = vector_from(e[i][k2], where);
            if (int(v.size()) != d[2]) bad(where, "wrong length");
            for (int k = 0; k < d[2]; ++k) t(i, k2, k) = v[k];
        }
    }
    return t;
}

Decomposition parse_decomposition(const std::string& text) {
    const json j = parse_text(text);
    Decomposition d;
    d.dims = shape_from(j);
    if (!j.contains("terms") || !j["terms"].is_array()) bad("document", "missing \"terms\" array");
    const json& ts = j["terms"];
    for (std::size_t n = 0; n < ts.size(); ++n) {
        const std::string where = "terms[" + std::to_string(n) + "]";
        if (!ts[n].is_object() || !ts[n].contains("a") || !ts[n].contains("b") || !ts[n].contains("c"))
            bad(where, "expected {\"a\",\"b\",\"c\"}");
        SimpleTensor s{vector_from(ts[n]["a"], where + ".a"), vector_from(ts[n]["b"], where + ".b"),
                       vector_from(ts[n]["c"], where + ".c")};
        if (int(s.a.size()) != d.dims[0] || int(s.b.size()) != d.dims[1] || int(s.c.size()) != d.dims[2])
            throw Error(ErrorKind::DimensionMismatch, where + ": factor lengths do not match the shape");
        d.terms.push_back(std::move(s));
    }
    return d;
}

std::string read_input(const std::string& path) {
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Parse, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace qtrank::io
