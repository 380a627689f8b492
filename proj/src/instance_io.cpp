#include "proxpen/instance_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace proxpen {

namespace {

constexpr char kMagic[8] = {'P', 'R', 'O', 'X', 'P', 'E', 'N', '1'};

template <class T>
T to_little(T v)
{
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
    return v;
}

void write_u64(std::ostream& out, std::uint64_t v)
{
    v = to_little(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::istream& in)
{
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw InvalidInput("instance file: truncated");
    return to_little(v);
}

void write_doubles(std::ostream& out, const double* data, Index count)
{
    for (Index i = 0; i < count; ++i) {
        const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(data[i]));
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
}

void read_doubles(std::istream& in, double* data, Index count)
{
    for (Index i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) throw InvalidInput("instance file: truncated");
        data[i] = std::bit_cast<double>(to_little(bits));
    }
}

struct Section {
    std::string name;
    Index rows;
    Index cols;
};

} // namespace

const SimplexQpInstance& objective_of(const InstanceData& inst)
{
    if (const auto* lc = std::get_if<LinConstrQpInstance>(&inst)) return lc->objective;
    return std::get<SimplexQpInstance>(inst);
}

std::string instance_id(const InstanceData& inst)
{
    const SimplexQpInstance& q = objective_of(inst);
    std::ostringstream os;
    os << (std::holds_alternative<LinConstrQpInstance>(inst) ? "linconstr" : "simplex") << "-l" << q.l() << "-n"
       << q.n();
    if (const auto* lc = std::get_if<LinConstrQpInstance>(&inst)) os << "-leq" << lc->a_eq.rows();
    os << "-M" << q.declared.upper << "-m" << q.declared.lower << "-s" << q.seed;
    return os.str();
}

void write_instance(std::ostream& out, const InstanceData& inst)
{
    const SimplexQpInstance& q = objective_of(inst);
    const auto* lc = std::get_if<LinConstrQpInstance>(&inst);

    std::vector<std::pair<Section, const double*>> sections = {
        {{"A", q.a.rows(), q.a.cols()}, q.a.data()},
        {{"B", q.b_mat.rows(), q.b_mat.cols()}, q.b_mat.data()},
        {{"D", q.d.size(), 1}, q.d.data()},
        {{"b", q.b.size(), 1}, q.b.data()},
    };
    if (lc) {
        sections.push_back({{"A_eq", lc->a_eq.rows(), lc->a_eq.cols()}, lc->a_eq.data()});
        sections.push_back({{"b_eq", lc->b_eq.size(), 1}, lc->b_eq.data()});
        sections.push_back({{"z_feas", lc->z_feas.size(), 1}, lc->z_feas.data()});
    }

    nlohmann::json header = {
        {"format", "proxpen-instance"},
        {"version", 1},
        {"kind", lc ? "linconstr-qp" : "simplex-qp"},
        {"l", q.l()},
        {"n", q.n()},
        {"seed", q.seed},
        {"prng", "mt19937_64"},
        {"xi", q.xi},
        {"tau", q.tau},
        {"m", q.declared.lower},
        {"M", q.declared.upper},
    };
    if (lc) header["l_eq"] = lc->a_eq.rows();
    nlohmann::json secs = nlohmann::json::array();
    for (const auto& [s, data] : sections) secs.push_back({{"name", s.name}, {"rows", s.rows}, {"cols", s.cols}});
    header["sections"] = secs;

    const std::string text = header.dump();
    out.write(kMagic, sizeof kMagic);
    write_u64(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [s, data] : sections) write_doubles(out, data, s.rows * s.cols);
    if (!out) throw Error("instance file: write failed");
}

InstanceData read_instance(std::istream& in)
{
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
        throw InvalidInput("instance file: bad magic");
    }
    const std::uint64_t len = read_u64(in);
    if (len > (1u << 24)) throw InvalidInput("instance file: header too large");
    std::string text(len, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(len))) throw InvalidInput("instance file: truncated");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("instance file: bad header: ") + e.what());
    }

    try {
        const std::string kind = header.at("kind");
        SimplexQpInstance q;
        q.seed = header.at("seed").get<std::uint64_t>();
        q.xi = header.at("xi").get<double>();
        q.tau = header.at("tau").get<double>();
        q.declared = {header.at("m").get<double>(), header.at("M").get<double>()};
        LinConstrQpInstance lc;

        for (const auto& s : header.at("sections")) {
            const std::string name = s.at("name");
            const Index rows = s.at("rows").get<Index>();
            const Index cols = s.at("cols").get<Index>();
            if (rows < 0 || cols < 0 || rows * cols > (Index{1} << 28)) throw InvalidInput("instance file: bad shape");
            auto read_matrix = [&](Matrix& m) {
                m.resize(rows, cols);
                read_doubles(in, m.data(), rows * cols);
            };
            auto read_vector = [&](Vector& v) {
                if (cols != 1) throw InvalidInput("instance file: section " + name + " must be a column");
                v.resize(rows);
                read_doubles(in, v.data(), rows);
            };
            if (name == "A") read_matrix(q.a);
            else if (name == "B") read_matrix(q.b_mat);
            else if (name == "D") read_vector(q.d);
            else if (name == "b") read_vector(q.b);
            else if (name == "A_eq") read_matrix(lc.a_eq);
            else if (name == "b_eq") read_vector(lc.b_eq);
            else if (name == "z_feas") read_vector(lc.z_feas);
            else throw InvalidInput("instance file: unknown section " + name);
        }
        const Index n = q.a.cols();
        if (q.b_mat.rows() != n || q.b_mat.cols() != n || q.d.size() != n || q.b.size() != q.a.rows()) {
            throw InvalidInput("instance file: inconsistent dimensions");
        }
        if (kind == "simplex-qp") return q;
        if (kind != "linconstr-qp") throw InvalidInput("instance file: unknown kind " + kind);
        if (lc.a_eq.cols() != n || lc.b_eq.size() != lc.a_eq.rows() || lc.z_feas.size() != n) {
            throw InvalidInput("instance file: inconsistent constraint dimensions");
        }
        lc.objective = std::move(q);
        return lc;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("instance file: bad header: ") + e.what());
    }
}

void save_instance(const std::string& path, const InstanceData& inst)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open " + path + " for writing");
    write_instance(out, inst);
}

InstanceData load_instance(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path);
    return read_instance(in);
}

} // namespace proxpen
