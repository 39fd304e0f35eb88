#pragma once

// Little-endian fixed-width encoding independent of host byte order.

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mpcanet/tensor.hpp"

namespace mpcanet {

class BinaryWriter {
public:
    explicit BinaryWriter(std::ostream& os) : os_(os) {}

    void bytes(std::string_view raw);
    void u8(std::uint8_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);

    /// u32 that must not exceed 2^32 - 1.
    void count(std::size_t v);
    void string(std::string_view s);
    void shape(const Shape& dims);
    /// Order, extents, then payload.
    void tensor(const DenseTensor& t);
    void matrix(const DenseMatrix& m);
    void reals(const std::vector<double>& v);
    void indices(const std::vector<std::size_t>& v);

private:
    std::ostream& os_;
};

/// Every read throws FormatError on truncation or malformed content.
class BinaryReader {
public:
    explicit BinaryReader(std::istream& is) : is_(is) {}

    std::string bytes(std::size_t n);
    void expect_magic(std::string_view magic, std::string_view what);
    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    double f64();

    std::size_t count();
    /// n consecutive f64 values.
    std::vector<double> payload(std::size_t n);
    std::string string();
    Shape shape();
    DenseTensor tensor();
    DenseMatrix matrix();
    std::vector<double> reals();
    std::vector<std::size_t> indices();

    bool at_end();

private:
    std::istream& is_;
};

}  // namespace mpcanet
