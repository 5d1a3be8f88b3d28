#include "seqinf/serialization.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "seqinf/error.hpp"

namespace seqinf {

namespace {

constexpr std::uint32_t format_version = 1;

class ByteWriter {
public:
    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) {
            bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
        }
    }
    void u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i) {
            bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
        }
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void raw(const std::string& s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

    void save(const std::filesystem::path& path) const
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw CalibrationError("cannot open '" + path.string() + "' for writing");
        }
        out.write(bytes_.data(), static_cast<std::streamsize>(bytes_.size()));
        if (!out) {
            throw CalibrationError("write failed for '" + path.string() + "'");
        }
    }

private:
    std::vector<char> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(const std::filesystem::path& path) : path_(path.string())
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw CalibrationError("cannot open '" + path_ + "'");
        }
        bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
        }
        return v;
    }
    std::uint64_t u64()
    {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
        }
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string raw(std::size_t n)
    {
        need(n);
        std::string s(bytes_.data() + pos_, n);
        pos_ += n;
        return s;
    }
    void expect_end() const
    {
        if (pos_ != bytes_.size()) {
            throw CalibrationError("'" + path_ + "': trailing bytes");
        }
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const
    {
        if (bytes_.size() - pos_ < n) {
            throw CalibrationError("'" + path_ + "': truncated file");
        }
    }
    std::string path_;
    std::vector<char> bytes_;
    std::size_t pos_ = 0;
};

void check_magic(ByteReader& in, const char* magic, const std::filesystem::path& path)
{
    if (in.raw(4) != magic) {
        throw CalibrationError("'" + path.string() + "' is not a " + magic + " file");
    }
    const auto v = in.u32();
    if (v != format_version) {
        throw CalibrationError("'" + path.string() + "': unsupported format version " + std::to_string(v));
    }
}

} // namespace

void write_null_table(const NullTable& table, const std::filesystem::path& path)
{
    const auto& m = table.meta();
    ByteWriter w;
    w.raw("SQNT");
    w.u32(format_version);
    w.u32(static_cast<std::uint32_t>(m.kind));
    w.u32(static_cast<std::uint32_t>(m.monitoring));
    w.i32(m.stages);
    w.u32(static_cast<std::uint32_t>(m.label.size()));
    w.u64(table.size());
    w.u64(m.base_seed);
    w.u64(m.rule_hash);
    w.f64(m.drift[0]);
    w.f64(m.drift[1]);
    w.f64(m.dt);
    w.raw(m.label);
    if (m.kind == TableKind::stopping_time) {
        for (const auto& o : table.outcomes()) {
            w.f64(o.tau);
            w.f64(o.x_at_tau);
            w.i32(o.delta);
            w.u32(o.censored ? 1U : 0U);
        }
    } else {
        for (const auto& s : table.states()) {
            w.f64(s.q[0]);
            w.f64(s.q[1]);
            w.f64(s.x[0]);
            w.f64(s.x[1]);
            w.i32(s.batches);
            w.u32(0);
        }
    }
    w.save(path);
}

NullTable read_null_table(const std::filesystem::path& path)
{
    ByteReader in(path);
    check_magic(in, "SQNT", path);
    TableMeta m;
    const auto kind = in.u32();
    if (kind != static_cast<std::uint32_t>(TableKind::stopping_time) &&
        kind != static_cast<std::uint32_t>(TableKind::batched)) {
        throw CalibrationError("'" + path.string() + "': unknown table kind");
    }
    m.kind = static_cast<TableKind>(kind);
    const auto monitoring = in.u32();
    if (monitoring > 1) {
        throw CalibrationError("'" + path.string() + "': unknown monitoring mode");
    }
    m.monitoring = static_cast<Monitoring>(monitoring);
    m.stages = in.i32();
    const auto label_size = in.u32();
    const auto count = in.u64();
    m.base_seed = in.u64();
    m.rule_hash = in.u64();
    m.drift[0] = in.f64();
    m.drift[1] = in.f64();
    m.dt = in.f64();
    m.label = in.raw(label_size);
    const std::size_t record = m.kind == TableKind::stopping_time ? 24 : 40;
    if (in.remaining() != count * record) {
        throw CalibrationError("'" + path.string() + "': record count does not match header");
    }
    if (m.kind == TableKind::stopping_time) {
        std::vector<StoppedOutcome> outcomes(count);
        for (auto& o : outcomes) {
            o.tau = in.f64();
            o.x_at_tau = in.f64();
            o.delta = in.i32();
            o.censored = in.u32() != 0;
        }
        in.expect_end();
        return NullTable::from_outcomes(std::move(outcomes), std::move(m));
    }
    std::vector<BatchedState> states(count);
    for (auto& s : states) {
        s.q[0] = in.f64();
        s.q[1] = in.f64();
        s.x[0] = in.f64();
        s.x[1] = in.f64();
        s.batches = in.i32();
        in.u32();
    }
    in.expect_end();
    return NullTable::from_states(std::move(states), std::move(m));
}

void write_threshold_table(const ThresholdTable& table, const std::filesystem::path& path)
{
    ByteWriter w;
    w.raw("SQTT");
    w.u32(format_version);
    w.u32(static_cast<std::uint32_t>(table.stages.size()));
    w.u32(0);
    w.f64(table.alpha);
    for (const auto& s : table.stages) {
        w.i32(s.stage);
        w.u32(static_cast<std::uint32_t>(s.mode));
        w.f64(s.lower);
        w.f64(s.upper);
        w.f64(s.p_stop);
        w.f64(s.alpha_t);
        w.u64(s.draws);
        w.u32(s.symmetric ? 1U : 0U);
        w.u32(0);
    }
    w.save(path);
}

ThresholdTable read_threshold_table(const std::filesystem::path& path)
{
    ByteReader in(path);
    check_magic(in, "SQTT", path);
    ThresholdTable t;
    const auto count = in.u32();
    in.u32();
    t.alpha = in.f64();
    if (in.remaining() != static_cast<std::size_t>(count) * 56) {
        throw CalibrationError("'" + path.string() + "': record count does not match header");
    }
    t.stages.resize(count);
    for (auto& s : t.stages) {
        s.stage = in.i32();
        const auto mode = in.u32();
        if (mode > 2) {
            throw CalibrationError("'" + path.string() + "': unknown stage mode");
        }
        s.mode = static_cast<StageMode>(mode);
        s.lower = in.f64();
        s.upper = in.f64();
        s.p_stop = in.f64();
        s.alpha_t = in.f64();
        s.draws = in.u64();
        s.symmetric = in.u32() != 0;
        in.u32();
    }
    in.expect_end();
    return t;
}

} // namespace seqinf
