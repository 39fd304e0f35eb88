#include <doctest.h>

#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "mpcanet/dataset.hpp"
#include "mpcanet/error.hpp"
#include "mpcanet/rng.hpp"
#include "support.hpp"

using namespace mpcanet;

namespace {

// Straight transcription of the public-domain reference generator.
struct RefXoshiro {
    std::uint64_t s[4];
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t next() {
        const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }
};

std::string bytes_of(const DenseTensor& t) {
    std::ostringstream os;
    write_tensor(os, t);
    return os.str();
}

DenseTensor from_bytes(const std::string& s) {
    std::istringstream is(s);
    return read_tensor(is);
}

}  // namespace

TEST_CASE("splitmix64 and xoshiro256** streams") {
    SplitMix64 sm(0);
    CHECK(sm.next() == 0xe220a8397b1dcdafULL);

    for (std::uint64_t seed : {0ULL, 1ULL, 0xdeadbeefULL}) {
        SplitMix64 expand(seed);
        RefXoshiro ref{{expand.next(), expand.next(), expand.next(), expand.next()}};
        Xoshiro256 rng(seed);
        for (int i = 0; i < 1000; ++i) CHECK(rng.next() == ref.next());
    }

    Xoshiro256 rng(9);
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform();
        CHECK((u >= 0.0 && u < 1.0));
        CHECK(rng.below(7) < 7);
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / 20000) < 0.05);
    CHECK(std::abs(sq / 20000 - 1.0) < 0.05);
}

TEST_CASE("tensor file byte layout") {
    const DenseTensor t({2}, {1.0, -2.0});
    std::string expected = "TOBJ";
    expected += '\x01';
    expected += '\x01';
    expected += std::string("\x02\x00\x00\x00", 4);
    expected += std::string("\x00\x00\x00\x00\x00\x00\xf0\x3f", 8);
    expected += std::string("\x00\x00\x00\x00\x00\x00\x00\xc0", 8);
    CHECK(bytes_of(t) == expected);
}

TEST_CASE("tensor file round trip is bitwise") {
    std::mt19937_64 rng(60);
    const auto t = oracle::random_tensor({3, 4, 5}, rng);
    const auto back = from_bytes(bytes_of(t));
    CHECK(back == t);
    CHECK(std::memcmp(back.data().data(), t.data().data(), t.size() * sizeof(double)) == 0);

    const DenseTensor one({1}, {std::numeric_limits<double>::denorm_min()});
    CHECK(from_bytes(bytes_of(one)) == one);

    const auto wide = oracle::random_tensor({1u << 16}, rng);
    CHECK(from_bytes(bytes_of(wide)) == wide);

    oracle::TempDir dir("tobj");
    write_tensor_file(dir.path / "a.tobj", t);
    CHECK(read_tensor_file(dir.path / "a.tobj") == t);
    CHECK_THROWS_AS(read_tensor_file(dir.path / "missing.tobj"), DataError);
}

TEST_CASE("malformed tensor files") {
    const auto good = bytes_of(DenseTensor({2, 2}, {1, 2, 3, 4}));

    auto bad_magic = good;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(from_bytes(bad_magic), BadMagicError);

    CHECK_THROWS_AS(from_bytes(good.substr(0, good.size() - 1)), FormatError);
    CHECK_THROWS_AS(from_bytes(good.substr(0, 5)), FormatError);
    CHECK_THROWS_AS(from_bytes(good + "x"), FormatError);

    auto bad_version = good;
    bad_version[4] = 2;
    CHECK_THROWS_AS(from_bytes(bad_version), FormatError);

    auto zero_order = good;
    zero_order[5] = 0;
    CHECK_THROWS_AS(from_bytes(zero_order), FormatError);

    auto zero_extent = good;
    zero_extent[6] = 0;
    CHECK_THROWS_AS(from_bytes(zero_extent), FormatError);

    // Extents whose product overflows must not allocate.
    std::string huge = "TOBJ";
    huge += '\x01';
    huge += '\x04';
    for (int i = 0; i < 4; ++i) huge += std::string("\xff\xff\xff\xff", 4);
    CHECK_THROWS_AS(from_bytes(huge), FormatError);
}

TEST_CASE("manifests and datasets") {
    oracle::TempDir dir("manifest");
    std::mt19937_64 rng(61);
    DatasetManifest m;
    m.dims = Shape{2, 3};
    std::vector<DenseTensor> ts;
    for (int i = 0; i < 4; ++i) {
        ts.push_back(oracle::random_tensor({2, 3}, rng));
        const std::string name = "t" + std::to_string(i) + ".tobj";
        write_tensor_file(dir.path / name, ts.back());
        m.entries.push_back({name, i % 2 ? "dog" : "cat"});
    }
    write_manifest(dir.path / "m.json", m);
    const auto ds = load_dataset(dir.path / "m.json");
    CHECK(ds.size() == 4);
    CHECK(ds.label_names == std::vector<std::string>{"cat", "dog"});
    CHECK(ds.labels == std::vector<std::size_t>{0, 1, 0, 1});
    for (int i = 0; i < 4; ++i) CHECK(ds.tensors[i] == ts[i]);

    const auto sub = ds.subset(std::vector<std::size_t>{3, 0});
    CHECK(sub.labels == std::vector<std::size_t>{1, 0});
    CHECK(sub.label_names == ds.label_names);
    CHECK(sub.tensors[0] == ts[3]);

    write_tensor_file(dir.path / "odd.tobj", oracle::random_tensor({3, 2}, rng));
    m.entries.push_back({"odd.tobj", "cat"});
    write_manifest(dir.path / "bad.json", m);
    try {
        load_dataset(dir.path / "bad.json");
        FAIL("expected a dimension error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("odd.tobj") != std::string::npos);
    }

    write_manifest(dir.path / "empty.json", DatasetManifest{});
    CHECK(load_dataset(dir.path / "empty.json").size() == 0);

    std::ofstream(dir.path / "junk.json") << "{\"entries\": 3}";
    CHECK_THROWS_AS(load_dataset(dir.path / "junk.json"), DataError);
    CHECK_THROWS_AS(load_dataset(dir.path / "nope.json"), DataError);

    const auto out = dir.path / "copy";
    write_dataset(ds, out);
    const auto again = load_dataset(out / "manifest.json");
    CHECK(again.tensors == ds.tensors);
    CHECK(again.labels == ds.labels);
}

TEST_CASE("stratified split") {
    std::vector<std::size_t> labels;
    for (std::size_t c = 0; c < 2; ++c)
        for (int i = 0; i < 10; ++i) labels.push_back(c);
    const auto s = stratified_split(labels, 0.5, 3);
    CHECK(s.train.size() == 10);
    CHECK(s.test.size() == 10);
    std::size_t train0 = 0;
    for (auto i : s.train) train0 += labels[i] == 0;
    CHECK(train0 == 5);

    const auto again = stratified_split(labels, 0.5, 3);
    CHECK(again.train == s.train);
    CHECK(again.test == s.test);

    std::set<std::vector<std::size_t>> distinct;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto r = stratified_split(labels, 0.5, seed);
        CHECK(std::is_sorted(r.train.begin(), r.train.end()));
        CHECK(std::is_sorted(r.test.begin(), r.test.end()));
        std::vector<std::size_t> all = r.train;
        all.insert(all.end(), r.test.begin(), r.test.end());
        std::sort(all.begin(), all.end());
        std::vector<std::size_t> expect(labels.size());
        std::iota(expect.begin(), expect.end(), 0);
        CHECK(all == expect);
        distinct.insert(r.train);
    }
    CHECK(distinct.size() >= 95);

    // Three classes of three: 1.5 rounds up, down, up.
    const std::vector<std::size_t> odd{0, 0, 0, 1, 1, 1, 2, 2, 2};
    const auto t = stratified_split(odd, 0.5, 0);
    std::size_t per[3] = {0, 0, 0};
    for (auto i : t.train) ++per[odd[i]];
    CHECK(per[0] == 2);
    CHECK(per[1] == 1);
    CHECK(per[2] == 2);

    // Clamped so both sides keep a member of every class.
    const auto lo = stratified_split(odd, 0.01, 0);
    CHECK(lo.train.size() == 3);
    const auto hi = stratified_split(odd, 0.99, 0);
    CHECK(hi.test.size() == 3);

    CHECK_THROWS_AS(stratified_split(std::vector<std::size_t>{0, 0, 1}, 0.5, 0), DataError);
    CHECK_THROWS_AS(stratified_split(labels, 0.0, 0), ConfigError);
    CHECK_THROWS_AS(stratified_split(labels, 1.0, 0), ConfigError);
}

TEST_CASE("synthetic generator") {
    SynthSpec spec;
    spec.dims = {6, 5, 4};
    spec.num_classes = 3;
    spec.samples_per_class = 4;
    spec.template_rank = {2};
    spec.noise_sigma = 0.0;
    spec.seed = 11;
    const auto clean = synth_generate(spec);
    CHECK(clean.size() == 12);
    CHECK(clean.label_names == std::vector<std::string>{"class_0", "class_1", "class_2"});
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(clean.labels[i] == i / 4);
        CHECK(clean.tensors[i] == clean.tensors[(i / 4) * 4]);
    }
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = a + 1; b < 3; ++b)
            CHECK(frobenius_sq_distance(clean.tensors[a * 4], clean.tensors[b * 4]) > 1e-6);

    // The template has the requested multilinear rank: every unfolding has rank 2.
    const auto& tmpl = clean.tensors[0];
    for (std::size_t n = 0; n < 3; ++n) {
        const auto g = gram_rows(unfold(tmpl, n));
        const auto [vals, vecs] = oracle::power_eigen(g, g.rows());
        CHECK(vals[1] > 1e-6 * vals[0]);
        for (std::size_t k = 2; k < vals.size(); ++k) CHECK(std::abs(vals[k]) < 1e-9 * vals[0]);
    }

    spec.noise_sigma = 0.1;
    const auto a = synth_generate(spec);
    const auto b = synth_generate(spec);
    CHECK(a.tensors == b.tensors);
    CHECK(a.tensors[0] != a.tensors[1]);
    spec.seed = 12;
    CHECK(synth_generate(spec).tensors != a.tensors);

    spec.template_rank = {7};
    CHECK_THROWS_AS(synth_generate(spec), ConfigError);
    spec.template_rank = {2, 2};
    CHECK_THROWS_AS(synth_generate(spec), ConfigError);
}
