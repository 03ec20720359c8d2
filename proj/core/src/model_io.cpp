#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "lrbms/error.hpp"
#include "lrbms/rom.hpp"

namespace lrbms {

namespace {

constexpr char kMagic[8] = {'L', 'R', 'B', 'M', 'S', 'R', 'O', 'M'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

class Writer {
public:
    template <typename T>
    void put(T v) {
        out_.append(reinterpret_cast<const char*>(&v), sizeof v);
    }
    void put_vector(const Vector& v) {
        put<std::int64_t>(v.size());
        out_.append(reinterpret_cast<const char*>(v.data()), sizeof(double) * v.size());
    }
    void put_matrix(const DenseMatrix& m) {
        put<std::int64_t>(m.rows());
        put<std::int64_t>(m.cols());
        out_.append(reinterpret_cast<const char*>(m.data()), sizeof(double) * m.size());
    }
    const std::string& bytes() const { return out_; }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(const std::string& bytes) : in_(bytes) {}

    template <typename T>
    T get() {
        T v;
        take(&v, sizeof v);
        return v;
    }
    Vector get_vector() {
        const auto n = get<std::int64_t>();
        check_count(n);
        Vector v(n);
        take(v.data(), sizeof(double) * n);
        return v;
    }
    DenseMatrix get_matrix() {
        const auto r = get<std::int64_t>();
        const auto c = get<std::int64_t>();
        check_count(r);
        check_count(c);
        check_count(r * c);
        DenseMatrix m(r, c);
        take(m.data(), sizeof(double) * m.size());
        return m;
    }
    bool done() const { return pos_ == in_.size(); }

private:
    void check_count(std::int64_t n) const {
        if (n < 0 || static_cast<std::uint64_t>(n) * sizeof(double) > in_.size() - pos_) {
            throw IoError("reduced model file is corrupt (bad length field)");
        }
    }
    void take(void* dst, std::size_t n) {
        if (n > in_.size() - pos_) throw IoError("reduced model file is truncated");
        std::memcpy(dst, in_.data() + pos_, n);
        pos_ += n;
    }

    const std::string& in_;
    std::size_t pos_ = 0;
};

}  // namespace

void save_model(const ReducedModel& model, const std::string& path) {
    Writer w;
    w.put(model.lx);
    w.put(model.ly);
    w.put<std::int32_t>(model.nx);
    w.put<std::int32_t>(model.ny);
    w.put<std::int32_t>(model.coarse_nx);
    w.put<std::int32_t>(model.coarse_ny);
    w.put<std::int32_t>(model.order);
    w.put<std::uint64_t>(model.grid_checksum);
    w.put<std::int32_t>(model.mobility.size());
    for (int q = 0; q < model.mobility.size(); ++q) {
        w.put_vector(model.mobility.wetting(q).coefficients());
        w.put_vector(model.mobility.nonwetting(q).coefficients());
    }
    w.put<std::int32_t>(static_cast<std::int32_t>(model.bases.cells.size()));
    for (const auto& b : model.bases.cells) w.put_matrix(b);
    const ReducedOperators& ops = model.operators;
    w.put_matrix(ops.c);
    w.put_vector(ops.e);
    w.put<std::int32_t>(static_cast<std::int32_t>(ops.b.size()));
    for (std::size_t q = 0; q < ops.b.size(); ++q) {
        w.put_matrix(ops.b[q]);
        w.put_vector(ops.d[q]);
    }
    w.put<std::int32_t>(static_cast<std::int32_t>(model.selected.size()));
    for (int s : model.selected) w.put<std::int32_t>(s);
    Vector history = Eigen::Map<const Vector>(model.error_history.data(),
                                              static_cast<Eigen::Index>(model.error_history.size()));
    w.put_vector(history);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    const std::string& payload = w.bytes();
    const std::uint64_t length = payload.size();
    const std::uint64_t checksum = fnv1a(payload);
    out.write(kMagic, sizeof kMagic);
    out.write(reinterpret_cast<const char*>(&kVersion), sizeof kVersion);
    out.write(reinterpret_cast<const char*>(&length), sizeof length);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    out.write(reinterpret_cast<const char*>(&checksum), sizeof checksum);
    if (!out) throw IoError("write to '" + path + "' failed");
}

ReducedModel load_model(const std::string& path, const FineGrid& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open reduced model '" + path + "'");
    const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    constexpr std::size_t kHeader = sizeof kMagic + sizeof(std::uint32_t) + sizeof(std::uint64_t);
    if (file.size() < kHeader + sizeof(std::uint64_t) ||
        std::memcmp(file.data(), kMagic, sizeof kMagic) != 0) {
        throw IoError("'" + path + "' is not a reduced model file");
    }
    std::uint32_t version;
    std::uint64_t length;
    std::memcpy(&version, file.data() + sizeof kMagic, sizeof version);
    std::memcpy(&length, file.data() + sizeof kMagic + sizeof version, sizeof length);
    if (version != kVersion) {
        throw IoError("reduced model '" + path + "' has version " + std::to_string(version) +
                      ", expected " + std::to_string(kVersion));
    }
    if (length != file.size() - kHeader - sizeof(std::uint64_t)) {
        throw IoError("reduced model '" + path + "' is truncated");
    }
    const std::string payload = file.substr(kHeader, length);
    std::uint64_t checksum;
    std::memcpy(&checksum, file.data() + kHeader + length, sizeof checksum);
    if (checksum != fnv1a(payload)) throw IoError("reduced model '" + path + "' fails its checksum");

    Reader r(payload);
    ReducedModel model;
    model.lx = r.get<double>();
    model.ly = r.get<double>();
    model.nx = r.get<std::int32_t>();
    model.ny = r.get<std::int32_t>();
    model.coarse_nx = r.get<std::int32_t>();
    model.coarse_ny = r.get<std::int32_t>();
    model.order = r.get<std::int32_t>();
    model.grid_checksum = r.get<std::uint64_t>();
    if (model.nx != grid.nx() || model.ny != grid.ny()) {
        throw ConfigError("reduced model was built for a " + std::to_string(model.nx) + "x" +
                          std::to_string(model.ny) + " grid, scenario grid is " +
                          std::to_string(grid.nx()) + "x" + std::to_string(grid.ny()));
    }
    const int m = r.get<std::int32_t>();
    std::vector<DgField> w;
    std::vector<DgField> n;
    for (int q = 0; q < m; ++q) {
        DgField wq(grid.num_cells(), model.order);
        DgField nq(grid.num_cells(), model.order);
        const Eigen::Index dofs = wq.num_dofs();
        wq.coefficients() = r.get_vector();
        nq.coefficients() = r.get_vector();
        if (wq.coefficients().size() != dofs || nq.coefficients().size() != dofs) {
            throw IoError("reduced model '" + path + "' has mobility profiles of the wrong size");
        }
        w.push_back(std::move(wq));
        n.push_back(std::move(nq));
    }
    model.mobility = MobilityBasis(grid, std::move(w), std::move(n));
    const int cells = r.get<std::int32_t>();
    for (int e = 0; e < cells; ++e) model.bases.cells.push_back(r.get_matrix());
    model.operators.c = r.get_matrix();
    model.operators.e = r.get_vector();
    const int terms = r.get<std::int32_t>();
    for (int q = 0; q < terms; ++q) {
        model.operators.b.push_back(r.get_matrix());
        model.operators.d.push_back(r.get_vector());
    }
    const int selected = r.get<std::int32_t>();
    for (int i = 0; i < selected; ++i) model.selected.push_back(r.get<std::int32_t>());
    const Vector history = r.get_vector();
    model.error_history.assign(history.data(), history.data() + history.size());
    if (!r.done()) throw IoError("reduced model '" + path + "' has trailing data");
    return model;
}

}  // namespace lrbms
