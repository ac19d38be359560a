#include "dsid/dataset.hpp"

#include "dsid/rng.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace dsid {

Vector DataSet::x(Index i, Index k) const {
    if (!X) {
        throw InvalidArgument("dataset carries no true states");
    }
    return X->col(k).segment(i * n, n);
}

void DataSet::validate() const {
    if (N < 1 || m < 1 || r < 1) {
        throw DimensionError("dataset needs N, m, r >= 1");
    }
    if (U.rows() != N * m || Y.rows() != N * r) {
        throw DimensionError("dataset series rows inconsistent with (N, m, r)");
    }
    if (U.cols() != Y.cols()) {
        throw DimensionError("input and output series differ in length");
    }
    if (X && (X->rows() != N * n || X->cols() != Y.cols())) {
        throw DimensionError("state series inconsistent with (N, n, T)");
    }
}

DataSet simulate(const GlobalModel& model, const Matrix& U, const Vector& x0, Index T,
                 const std::optional<Matrix>& noise) {
    if (T < 1) {
        throw InvalidArgument("simulation horizon must be >= 1, got " + std::to_string(T));
    }
    const Index N = model.N();
    const Index n = model.n();
    const Index m = model.m();
    const Index r = model.r();
    if (U.rows() != N * m || U.cols() < T) {
        throw DimensionError("input series must be " + std::to_string(N * m) + " x >= " +
                             std::to_string(T));
    }
    if (x0.size() != N * n) {
        throw DimensionError("initial state must have length " + std::to_string(N * n));
    }
    if (noise && (noise->rows() != N * r || noise->cols() < T)) {
        throw DimensionError("noise series must be " + std::to_string(N * r) + " x >= " +
                             std::to_string(T));
    }

    DataSet data;
    data.N = N;
    data.m = m;
    data.r = r;
    data.n = n;
    data.U = U.leftCols(T);
    data.Y.resize(N * r, T);
    data.X.emplace(N * n, T);

    Vector x = x0;
    for (Index k = 0; k < T; ++k) {
        data.X->col(k) = x;
        for (Index i = 0; i < N; ++i) {
            data.Y.col(k).segment(i * r, r) = model.local(i).C * x.segment(i * n, n);
        }
        if (noise) data.Y.col(k) += noise->col(k);
        // x(k+1) = A x(k) + B u(k), exploiting the block-tridiagonal structure
        Vector next = model.apply_A(x);
        for (Index i = 0; i < N; ++i) {
            next.segment(i * n, n) += model.local(i).B * U.col(k).segment(i * m, m);
        }
        x = std::move(next);
    }
    return data;
}

Matrix add_noise_snr(const Matrix& Y, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0) {
        return Y;
    }
    if (!std::isfinite(snr_db)) {
        throw InvalidArgument("snr_db must be finite or +inf");
    }
    const Index T = Y.cols();
    if (T < 2) {
        throw DegenerateData("need at least two samples to estimate channel variance");
    }
    Matrix noisy = Y;
    const double ratio = std::pow(10.0, snr_db / 10.0);
    for (Index ch = 0; ch < Y.rows(); ++ch) {
        const double mean = Y.row(ch).mean();
        const double var = (Y.row(ch).array() - mean).square().sum() / static_cast<double>(T);
        if (var <= 0.0) {
            throw DegenerateData("output channel " + std::to_string(ch) +
                                 " has zero variance; SNR is undefined");
        }
        const double sigma = std::sqrt(var / ratio);
        // one stream per channel so channel count changes don't reshuffle others
        Vector e = gaussian_vector(T, derive_seed(seed, 0x6e6f6973u /*'nois'*/, ch));
        noisy.row(ch) += sigma * e.transpose();
    }
    return noisy;
}

Matrix white_noise_inputs(Index N, Index m, Index T, std::uint64_t seed) {
    Matrix U(N * m, T);
    for (Index ch = 0; ch < N * m; ++ch) {
        U.row(ch) = gaussian_vector(T, derive_seed(seed, 0x696e7075u /*'inpu'*/, ch)).transpose();
    }
    return U;
}

void write_dataset_csv(std::ostream& os, const DataSet& data) {
    data.validate();
    const bool with_x = data.X.has_value();
    os << "k,subsystem";
    for (Index j = 0; j < data.m; ++j) os << ",u_" << (j + 1);
    for (Index j = 0; j < data.r; ++j) os << ",y_" << (j + 1);
    if (with_x) {
        for (Index j = 0; j < data.n; ++j) os << ",x_" << (j + 1);
    }
    os << "\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << ',' << buf;
    };
    for (Index k = 0; k < data.T(); ++k) {
        for (Index i = 0; i < data.N; ++i) {
            os << k << ',' << i;
            for (Index j = 0; j < data.m; ++j) put(data.U(i * data.m + j, k));
            for (Index j = 0; j < data.r; ++j) put(data.Y(i * data.r + j, k));
            if (with_x) {
                for (Index j = 0; j < data.n; ++j) put((*data.X)(i * data.n + j, k));
            }
            os << "\n";
        }
    }
}

void write_dataset_csv(const std::string& path, const DataSet& data) {
    std::ofstream os(path);
    if (!os) {
        throw Error("cannot open " + path + " for writing");
    }
    write_dataset_csv(os, data);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

}  // namespace

DataSet read_dataset_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw Error("empty dataset file");
    }
    const auto header = split_csv_line(line);
    Index m = 0, r = 0, n = 0;
    for (const auto& h : header) {
        if (h.rfind("u_", 0) == 0) ++m;
        else if (h.rfind("y_", 0) == 0) ++r;
        else if (h.rfind("x_", 0) == 0) ++n;
    }
    if (header.size() < 2 || header[0] != "k" || header[1] != "subsystem" || m == 0 || r == 0) {
        throw Error("malformed dataset header: " + line);
    }

    struct Row {
        Index k, i;
        std::vector<double> vals;
    };
    std::vector<Row> rows;
    Index N = 0, T = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<Index>(fields.size()) != 2 + m + r + n) {
            throw Error("dataset row has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(2 + m + r + n));
        }
        Row row;
        row.k = std::stoll(fields[0]);
        row.i = std::stoll(fields[1]);
        for (size_t f = 2; f < fields.size(); ++f) row.vals.push_back(std::stod(fields[f]));
        N = std::max(N, row.i + 1);
        T = std::max(T, row.k + 1);
        rows.push_back(std::move(row));
    }
    if (static_cast<Index>(rows.size()) != N * T) {
        throw Error("dataset has " + std::to_string(rows.size()) + " rows, expected N*T = " +
                    std::to_string(N * T));
    }

    DataSet data;
    data.N = N;
    data.m = m;
    data.r = r;
    data.n = n;
    data.U.setZero(N * m, T);
    data.Y.setZero(N * r, T);
    if (n > 0) data.X.emplace(Matrix::Zero(N * n, T));
    for (const auto& row : rows) {
        size_t f = 0;
        for (Index j = 0; j < m; ++j) data.U(row.i * m + j, row.k) = row.vals[f++];
        for (Index j = 0; j < r; ++j) data.Y(row.i * r + j, row.k) = row.vals[f++];
        for (Index j = 0; j < n; ++j) (*data.X)(row.i * n + j, row.k) = row.vals[f++];
    }
    data.validate();
    return data;
}

DataSet read_dataset_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw Error("cannot open " + path);
    }
    return read_dataset_csv(is);
}

}  // namespace dsid
