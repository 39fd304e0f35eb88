#include "mpcanet/binary_io.hpp"

#include <bit>
#include <limits>

#include "mpcanet/error.hpp"

namespace mpcanet {

namespace {

// Upper bound on element counts read from untrusted files.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 36;

std::uint64_t checked_volume(const Shape& dims) {
    std::uint64_t v = 1;
    for (auto d : dims) {
        if (d == 0) throw FormatError("zero extent in stored shape");
        if (v > kMaxElements / d) throw FormatError("stored shape " + shape_to_string(dims) + " is too large");
        v *= d;
    }
    return v;
}

}  // namespace

void BinaryWriter::bytes(std::string_view raw) { os_.write(raw.data(), static_cast<std::streamsize>(raw.size())); }

void BinaryWriter::u8(std::uint8_t v) { os_.put(static_cast<char>(v)); }

void BinaryWriter::u32(std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os_.write(buf, 4);
}

void BinaryWriter::u64(std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os_.write(buf, 8);
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::count(std::size_t v) {
    if (v > std::numeric_limits<std::uint32_t>::max()) throw FormatError("count does not fit in 32 bits");
    u32(static_cast<std::uint32_t>(v));
}

void BinaryWriter::string(std::string_view s) {
    count(s.size());
    bytes(s);
}

void BinaryWriter::shape(const Shape& dims) {
    count(dims.size());
    for (auto d : dims) count(d);
}

void BinaryWriter::tensor(const DenseTensor& t) {
    shape(t.dims());
    for (auto v : t.data()) f64(v);
}

void BinaryWriter::matrix(const DenseMatrix& m) {
    count(m.rows());
    count(m.cols());
    for (auto v : m.data()) f64(v);
}

void BinaryWriter::reals(const std::vector<double>& v) {
    count(v.size());
    for (auto x : v) f64(x);
}

void BinaryWriter::indices(const std::vector<std::size_t>& v) {
    count(v.size());
    for (auto x : v) count(x);
}

std::string BinaryReader::bytes(std::size_t n) {
    std::string s(n, '\0');
    is_.read(s.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) throw FormatError("unexpected end of file");
    return s;
}

void BinaryReader::expect_magic(std::string_view magic, std::string_view what) {
    std::string got(magic.size(), '\0');
    is_.read(got.data(), static_cast<std::streamsize>(magic.size()));
    if (static_cast<std::size_t>(is_.gcount()) != magic.size() || got != magic)
        throw BadMagicError("bad magic: not a " + std::string(what) + " (expected \"" + std::string(magic) + "\")");
}

std::uint8_t BinaryReader::u8() { return static_cast<std::uint8_t>(bytes(1)[0]); }

std::uint32_t BinaryReader::u32() {
    const auto b = bytes(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
}

std::uint64_t BinaryReader::u64() {
    const auto b = bytes(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::size_t BinaryReader::count() { return u32(); }

std::string BinaryReader::string() { return bytes(count()); }

Shape BinaryReader::shape() {
    const auto order = count();
    if (order == 0 || order > 64) throw FormatError("stored tensor order " + std::to_string(order) + " is invalid");
    Shape dims(order);
    for (auto& d : dims) d = count();
    checked_volume(dims);
    return dims;
}

std::vector<double> BinaryReader::payload(std::size_t n) {
    // Grow as data arrives so a corrupt header cannot force a huge allocation.
    std::vector<double> v;
    v.reserve(std::min<std::size_t>(n, 1 << 20));
    for (std::size_t i = 0; i < n; ++i) v.push_back(f64());
    return v;
}

DenseTensor BinaryReader::tensor() {
    Shape dims = shape();
    auto data = payload(shape_volume(dims));
    return DenseTensor(std::move(dims), std::move(data));
}

DenseMatrix BinaryReader::matrix() {
    const auto rows = count();
    const auto cols = count();
    if (rows && cols) checked_volume({rows, cols});
    return DenseMatrix(rows, cols, payload(rows * cols));
}

std::vector<double> BinaryReader::reals() { return payload(count()); }

std::vector<std::size_t> BinaryReader::indices() {
    const auto n = count();
    std::vector<std::size_t> v;
    v.reserve(std::min<std::size_t>(n, 1 << 20));
    for (std::size_t i = 0; i < n; ++i) v.push_back(count());
    return v;
}

bool BinaryReader::at_end() { return is_.peek() == std::char_traits<char>::eof(); }

}  // namespace mpcanet
