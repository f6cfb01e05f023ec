#include "gpexperts/data_io.hpp"

#include "gpexperts/gp.hpp"
#include "gpexperts/rng.hpp"

#include <zlib.h>

#include <Eigen/Cholesky>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace gpexperts {

namespace {

std::string read_text_file(const std::string& path) {
    if (path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0) {
        gzFile f = gzopen(path.c_str(), "rb");
        if (!f) throw InputError("load_csv: cannot open " + path);
        std::string out;
        char buf[1 << 16];
        int got;
        while ((got = gzread(f, buf, sizeof(buf))) > 0) out.append(buf, got);
        bool bad = got < 0;
        gzclose(f);
        if (bad) throw InputError("load_csv: gzip read error in " + path);
        return out;
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("load_csv: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool parse_double(const std::string& field, double* out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    if (begin == end) return false;
    auto [ptr, ec] = std::from_chars(begin, end, *out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type at = 0;
    for (;;) {
        auto comma = line.find(',', at);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(at));
            break;
        }
        fields.push_back(line.substr(at, comma - at));
        at = comma + 1;
    }
    return fields;
}

void init_identity_stats(Dataset& ds) {
    ds.feature_means = Vector::Zero(ds.dim());
    ds.feature_stds = Vector::Ones(ds.dim());
    ds.target_mean = 0.0;
    ds.target_std = 1.0;
    ds.standardized = false;
}

}  // namespace

Dataset load_csv(const std::string& path) {
    std::string text = read_text_file(path);

    std::vector<std::vector<double>> rows;
    std::size_t n_cols = 0;
    int line_no = 0;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_fields(line);
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (!parse_double(fields[c], &row[c])) {
                numeric = false;
                if (line_no == 1) break;  // header row
                std::ostringstream msg;
                msg << "load_csv: unparseable field at row " << line_no << ", column "
                    << (c + 1) << " of " << path;
                throw InputError(msg.str());
            }
        }
        if (!numeric) continue;  // skipped header
        if (rows.empty()) {
            n_cols = row.size();
            if (n_cols < 2) {
                throw InputError("load_csv: need at least one feature column plus target");
            }
        } else if (row.size() != n_cols) {
            std::ostringstream msg;
            msg << "load_csv: ragged row " << line_no << " in " << path << " ("
                << row.size() << " fields, expected " << n_cols << ")";
            throw InputError(msg.str());
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("load_csv: no data rows in " + path);

    Dataset ds;
    const int n = static_cast<int>(rows.size());
    const int d = static_cast<int>(n_cols) - 1;
    ds.X.resize(n, d);
    ds.y.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) ds.X(i, c) = rows[i][c];
        ds.y(i) = rows[i][d];
    }
    init_identity_stats(ds);
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw InputError("save_csv: cannot open " + path + " for writing");
    f.precision(17);
    for (int i = 0; i < ds.n(); ++i) {
        for (int c = 0; c < ds.dim(); ++c) f << ds.X(i, c) << ',';
        f << ds.y(i) << '\n';
    }
    if (!f) throw InputError("save_csv: write failed for " + path);
}

std::pair<Dataset, Dataset> standardize(const Dataset& train, const Dataset& test) {
    if (train.n() < 1) throw InputError("standardize: empty training set");
    if (test.n() > 0 && test.dim() != train.dim()) {
        throw InputError("standardize: train/test dimension mismatch");
    }
    const int n = train.n();
    const int d = train.dim();

    Vector means(d), stds(d);
    for (int c = 0; c < d; ++c) {
        means(c) = train.X.col(c).mean();
        double var = (train.X.col(c).array() - means(c)).square().sum() / n;
        double sd = std::sqrt(var);
        if (sd < 1e-12) {  // constant column: pass through
            means(c) = 0.0;
            stds(c) = 1.0;
        } else {
            stds(c) = sd;
        }
    }
    double y_mean = train.y.mean();
    double y_sd = std::sqrt((train.y.array() - y_mean).square().sum() / n);
    if (y_sd < 1e-12) {
        y_mean = 0.0;
        y_sd = 1.0;
    }

    auto apply = [&](const Dataset& src) {
        Dataset out = src;
        for (int c = 0; c < d; ++c) {
            out.X.col(c) = (src.X.col(c).array() - means(c)) / stds(c);
        }
        out.y = (src.y.array() - y_mean) / y_sd;
        out.feature_means = means;
        out.feature_stds = stds;
        out.target_mean = y_mean;
        out.target_std = y_sd;
        out.standardized = true;
        return out;
    };
    return {apply(train), apply(test)};
}

Dataset destandardize(const Dataset& ds) {
    if (!ds.standardized) return ds;
    Dataset out = ds;
    for (int c = 0; c < ds.dim(); ++c) {
        out.X.col(c) = ds.X.col(c).array() * ds.feature_stds(c) + ds.feature_means(c);
    }
    out.y = ds.y.array() * ds.target_std + ds.target_mean;
    init_identity_stats(out);
    return out;
}

Dataset synthetic_gp_data(int n, int d, const KernelSpec& kernel,
                          const HyperParams& params, bool heteroscedastic,
                          std::uint64_t seed) {
    if (n < 1) throw InputError("synthetic_gp_data: n must be >= 1");
    kernel.validate();
    params.validate(kernel);

    Rng rng(mix_seed(seed, 0x73796e74ULL));
    Dataset ds;
    ds.X.resize(n, d);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) ds.X(i, c) = rng.uniform(-3.0, 3.0);
    }

    Matrix K = eval_kernel(kernel, params, ds.X, ds.X);
    K.diagonal().array() += 1e-8 * params.total_signal_variance();
    Eigen::LLT<Matrix> llt(K);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("synthetic_gp_data: prior covariance not factorizable");
    }
    Vector z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    ds.y = Matrix(llt.matrixL()) * z;

    const double noise_sd = std::sqrt(params.noise_variance());
    for (int i = 0; i < n; ++i) {
        double sd = noise_sd;
        if (heteroscedastic) sd *= 1.0 + std::abs(ds.X(i, 0));
        ds.y(i) += sd * rng.normal();
    }
    init_identity_stats(ds);
    return ds;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, int n_train,
                                          std::uint64_t seed) {
    if (n_train < 1 || n_train > ds.n()) {
        throw InputError("split_dataset: n_train out of range");
    }
    std::vector<int> order(ds.n());
    for (int i = 0; i < ds.n(); ++i) order[i] = i;
    Rng rng(mix_seed(seed, 0x73706c74ULL));
    rng.shuffle(order);

    auto take = [&](int begin, int count) {
        Dataset out;
        out.X.resize(count, ds.dim());
        out.y.resize(count);
        for (int i = 0; i < count; ++i) {
            out.X.row(i) = ds.X.row(order[begin + i]);
            out.y(i) = ds.y(order[begin + i]);
        }
        init_identity_stats(out);
        return out;
    };
    return {take(0, n_train), take(n_train, ds.n() - n_train)};
}

}  // namespace gpexperts
