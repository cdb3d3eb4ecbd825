#include "volterra/problem_io.hpp"

#include <fstream>
#include <memory>

#include "volterra/expr.hpp"
#include "volterra/verify.hpp"

namespace volterra {

namespace {

using nlohmann::json;

/// Shared parsed matrix of expressions, evaluated entrywise.
MatFn matrix_evaluator(const json& rows, int m) {
    auto exprs = std::make_shared<std::vector<Expr>>();
    exprs->reserve(static_cast<std::size_t>(m * m));
    for (const auto& row : rows)
        for (const auto& cell : row) exprs->push_back(Expr::parse(cell.get<std::string>()));
    if (static_cast<int>(exprs->size()) != m * m)
        throw Error("problem file: kernel entry is not an m x m matrix of expressions");
    return [exprs, m](double t, double s) {
        Mat k(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                k(i, j) = (*exprs)[static_cast<std::size_t>(i * m + j)].eval(t, s);
        return k;
    };
}

ScalarFn scalar_evaluator(const std::string& text) {
    auto e = std::make_shared<Expr>(Expr::parse(text));
    return [e](double t) { return e->eval(t, 0.0); };
}

VecFn vector_evaluator(const json& entries, int m) {
    auto exprs = std::make_shared<std::vector<Expr>>();
    for (const auto& cell : entries) exprs->push_back(Expr::parse(cell.get<std::string>()));
    if (static_cast<int>(exprs->size()) != m)
        throw Error("problem file: f must have m expression entries");
    return [exprs, m](double t) {
        Vec v(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] = (*exprs)[static_cast<std::size_t>(i)].eval(t, 0.0);
        return v;
    };
}

Mat mat_from_json(const json& rows, int m) {
    Mat a(m, m);
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (const auto& cell : row) a(i, j++) = cell.get<double>();
        ++i;
    }
    return a;
}

json mat_to_json(const Mat& a) {
    json rows = json::array();
    for (int i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

json taylor_to_json(const TaylorData& td) {
    json doc;
    doc["N"] = td.N;
    json kernels = json::array();
    for (int i = 0; i < td.n; ++i) {
        json piece = json::array();
        for (int nu = 0; nu <= td.N; ++nu)
            for (int mu = 0; nu + mu <= td.N; ++mu) {
                const Mat& k = td.kernel(i, nu, mu);
                if (k.max_abs() == 0.0) continue;
                piece.push_back({{"nu", nu}, {"mu", mu}, {"mat", mat_to_json(k)}});
            }
        kernels.push_back(piece);
    }
    doc["kernels"] = kernels;
    json f = json::array();
    for (int nu = 1; nu <= td.N; ++nu) f.push_back(td.f_coeffs[static_cast<std::size_t>(nu)]);
    doc["f"] = f;
    json alphas = json::array();
    for (int i = 0; i + 1 < td.n; ++i) {
        json coeffs = json::array();
        for (int nu = 1; nu <= td.N; ++nu)
            coeffs.push_back(td.alpha_coeffs[static_cast<std::size_t>(i)][static_cast<std::size_t>(nu)]);
        alphas.push_back(coeffs);
    }
    doc["alphas"] = alphas;
    return doc;
}

TaylorData taylor_from_json(const json& doc, int m, int n) {
    const int N = doc.at("N").get<int>();
    TaylorData td = TaylorData::zeros(N, m, n);
    const json& kernels = doc.at("kernels");
    if (static_cast<int>(kernels.size()) != n)
        throw Error("taylor block: kernel list must have n entries");
    for (int i = 0; i < n; ++i)
        for (const auto& term : kernels[static_cast<std::size_t>(i)]) {
            const int nu = term.at("nu").get<int>();
            const int mu = term.at("mu").get<int>();
            if (nu < 0 || mu < 0 || nu + mu > N) throw Error("taylor block: degree out of range");
            td.kernel(i, nu, mu) = mat_from_json(term.at("mat"), m);
        }
    const json& f = doc.at("f");
    for (int nu = 1; nu <= N && nu <= static_cast<int>(f.size()); ++nu)
        td.f_coeffs[static_cast<std::size_t>(nu)] = f[static_cast<std::size_t>(nu - 1)].get<Vec>();
    const json& alphas = doc.at("alphas");
    for (int i = 0; i + 1 < n; ++i) {
        const json& coeffs = alphas.at(static_cast<std::size_t>(i));
        for (int nu = 1; nu <= N && nu <= static_cast<int>(coeffs.size()); ++nu)
            td.alpha_coeffs[static_cast<std::size_t>(i)][static_cast<std::size_t>(nu)] =
                coeffs[static_cast<std::size_t>(nu - 1)].get<double>();
    }
    return td;
}

ProblemSpec load_problem_json(const json& doc) {
    if (doc.contains("catalog")) return catalog(doc.at("catalog").get<std::string>()).problem;

    ProblemSpec p;
    p.name = doc.value("name", "");
    p.m = doc.at("m").get<int>();
    p.n = doc.at("n").get<int>();
    p.T = doc.at("T").get<double>();
    if (p.m < 1 || p.n < 1 || p.T <= 0.0) throw Error("problem file: bad m, n or T");

    const json& kernels = doc.at("kernels");
    if (static_cast<int>(kernels.size()) != p.n)
        throw Error("problem file: expected n kernel matrices");
    for (const auto& k : kernels) p.kernels.push_back(matrix_evaluator(k, p.m));

    const json& alphas = doc.at("alphas");
    if (static_cast<int>(alphas.size()) != p.n - 1)
        throw Error("problem file: expected n-1 curve expressions");
    for (const auto& a : alphas) p.alphas.push_back(scalar_evaluator(a.get<std::string>()));

    p.rhs = vector_evaluator(doc.at("f"), p.m);

    if (doc.contains("kernel_dt"))
        for (const auto& k : doc.at("kernel_dt")) p.kernel_dt.push_back(matrix_evaluator(k, p.m));
    if (doc.contains("alpha_dt"))
        for (const auto& a : doc.at("alpha_dt")) p.alpha_dt.push_back(scalar_evaluator(a.get<std::string>()));
    if (doc.contains("f_dt")) p.rhs_dt = vector_evaluator(doc.at("f_dt"), p.m);
    if (doc.contains("taylor")) p.taylor = taylor_from_json(doc.at("taylor"), p.m, p.n);
    return p;
}

ProblemSpec load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open problem file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw Error("problem file '" + path + "': " + e.what());
    }
    return load_problem_json(doc);
}

json catalog_to_json(const std::string& name) {
    const CatalogEntry entry = catalog(name);  // validates the name
    json doc;
    doc["name"] = name;
    doc["m"] = entry.problem.m;
    doc["n"] = entry.problem.n;
    doc["T"] = entry.problem.T;
    doc["alphas"] = json::array({"0.5*t"});
    doc["alpha_dt"] = json::array({"0.5"});

    // 2-D initializer lists of strings would parse as json objects, so the
    // matrices are assembled explicitly
    auto matrix1 = [](const std::string& a) { return json::array({json::array({a})}); };
    auto matrix2 = [](const std::string& a, const std::string& d) {
        return json::array({json::array({a, "0"}), json::array({"0", d})});
    };
    auto scalar_kernels = [&](const std::string& k1, const std::string& k2) {
        doc["kernels"] = json::array({matrix1(k1), matrix1(k2)});
        doc["kernel_dt"] = json::array({matrix1("0"), matrix1("0")});
    };
    if (name == "P_reg") {
        scalar_kernels("1", "2");
        doc["f"] = json::array({"t"});
        doc["f_dt"] = json::array({"1"});
    } else if (name == "P_sing") {
        scalar_kernels("-1", "1");
        doc["f"] = json::array({"t"});
        doc["f_dt"] = json::array({"1"});
    } else if (name == "P_man") {
        scalar_kernels("1", "2");
        doc["f"] = json::array({"1.5*t + 0.875*t^2"});
        doc["f_dt"] = json::array({"1.5 + 1.75*t"});
    } else if (name == "P_mat") {
        doc["kernels"] = json::array({matrix2("1", "3"), matrix2("-1", "1")});
        doc["kernel_dt"] = json::array({matrix2("0", "0"), matrix2("0", "0")});
        doc["f"] = json::array({"t", "t"});
        doc["f_dt"] = json::array({"1", "1"});
    } else {  // P_conv
        doc["kernels"] = json::array({matrix2("3+t-s", "3+t-s"), matrix2("2+t-s", "2+t-s")});
        doc["kernel_dt"] = json::array({matrix2("1", "1"), matrix2("1", "1")});
        doc["f"] = json::array({"2*sin(t)+sin(0.5*t)-cos(t)+1", "2+t-exp(-t)-exp(-0.5*t)"});
        doc["f_dt"] = json::array({"2*cos(t)+0.5*cos(0.5*t)+sin(t)", "1+exp(-t)+0.5*exp(-0.5*t)"});
    }
    if (entry.problem.taylor) doc["taylor"] = taylor_to_json(*entry.problem.taylor);
    return doc;
}

}  // namespace volterra
