#include <gtest/gtest.h>

#include <fstream>

#include "ctrf/io.hpp"
#include "support.hpp"

using namespace ctrf;
using namespace ctrf::io;
using namespace ctrf::test;

namespace {

class TempDir : public ::testing::Test {
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("ctrf_io_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    void write_text(const fs::path& p, const std::string& s) const { std::ofstream(p) << s; }

    fs::path dir_;
};

}  // namespace

TEST(Hten, ExactBytes)
{
    const DenseTensor t({2, 1}, {1.0, -2.0});
    const std::vector<std::uint8_t> expect = {
        'H', 'T', 'E', 'N', 1, 2,       //
        2, 0, 0, 0, 1, 0, 0, 0,         // dims
        1,                              // f64
        0, 0, 0, 0, 0, 0, 0xf0, 0x3f,   // 1.0
        0, 0, 0, 0, 0, 0, 0x00, 0xc0,   // -2.0
    };
    EXPECT_EQ(encode_hten(t), expect);
}

TEST(Hten, RoundTripIsBitExact)
{
    std::mt19937_64 rng(81);
    DenseTensor t = random_tensor({3, 4, 5}, rng);
    t.raw()[0] = -0.0;
    t.raw()[1] = std::numeric_limits<double>::denorm_min();
    t.raw()[2] = std::numeric_limits<double>::max();
    const DenseTensor back = decode_hten(encode_hten(t));
    ASSERT_EQ(back.shape(), t.shape());
    EXPECT_EQ(std::memcmp(back.raw(), t.raw(), sizeof(double) * static_cast<std::size_t>(t.size())), 0);
    EXPECT_EQ(encode_hten(back), encode_hten(t));
}

TEST(Hten, MalformedInputs)
{
    const std::vector<std::uint8_t> good = encode_hten(DenseTensor({2, 2}, {1, 2, 3, 4}));
    auto bad = good;
    bad[0] = 'X';
    EXPECT_THROW(decode_hten(bad), IoError);
    bad = good;
    bad[4] = 2;
    EXPECT_THROW(decode_hten(bad), IoError);
    bad = good;
    bad[5 + 1 + 8] = 2;  // dtype
    EXPECT_THROW(decode_hten(bad), IoError);
    bad = good;
    bad.pop_back();
    EXPECT_THROW(decode_hten(bad), IoError);
    bad = good;
    bad.push_back(0);
    EXPECT_THROW(decode_hten(bad), IoError);
    EXPECT_THROW(decode_hten({'H', 'T'}), IoError);
}

TEST_F(TempDir, TensorFileRoundTrip)
{
    std::mt19937_64 rng(82);
    const DenseTensor t = random_tensor({4, 3, 2}, rng);
    write_tensor(dir_ / "t.hten", t);
    EXPECT_EQ(read_tensor(dir_ / "t.hten"), t);
    EXPECT_EQ(read_file_bytes(dir_ / "t.hten"), encode_hten(t));
    EXPECT_THROW(read_tensor(dir_ / "missing.hten"), IoError);
}

TEST_F(TempDir, CsvWithShapeSidecar)
{
    write_text(dir_ / "v.csv", "1,2,3\n4, 5 ,6\n");
    write_text(dir_ / "s.txt", "2x3\n");
    EXPECT_EQ(read_tensor_csv(dir_ / "v.csv", dir_ / "s.txt"), DenseTensor({2, 3}, {1, 2, 3, 4, 5, 6}));
    write_text(dir_ / "s.txt", "1 3 2");
    EXPECT_EQ(read_tensor_csv(dir_ / "v.csv", dir_ / "s.txt").shape(), (Shape{1, 3, 2}));
    write_text(dir_ / "s.txt", "4,2");
    EXPECT_THROW(read_tensor_csv(dir_ / "v.csv", dir_ / "s.txt"), IoError);
    write_text(dir_ / "v.csv", "1,2,x,4,5,6");
    write_text(dir_ / "s.txt", "6");
    EXPECT_THROW(read_tensor_csv(dir_ / "v.csv", dir_ / "s.txt"), IoError);
}

TEST_F(TempDir, TextMatrixRoundTrip)
{
    std::mt19937_64 rng(83);
    const Matrix m = random_matrix(3, 5, rng);
    write_text_matrix(dir_ / "m.txt", m);
    EXPECT_EQ(read_text_matrix(dir_ / "m.txt"), m);
    write_text(dir_ / "r.txt", "1 2\n3\n");
    EXPECT_THROW(read_text_matrix(dir_ / "r.txt"), IoError);
}

TEST(ManifestText, RoundTripAndComments)
{
    Manifest m;
    m.set("seed", "7");
    m.set("snr_db", "inf");
    m.set("seed", "8");
    EXPECT_EQ(m.to_text(), "seed = 8\nsnr_db = inf\n");
    const Manifest p = Manifest::parse("# header\n\nseed = 8\n  snr_db=inf  \n");
    EXPECT_EQ(p.entries(), m.entries());
    EXPECT_EQ(p.get_or("missing", "x"), "x");
    EXPECT_THROW(p.get("missing"), IoError);
    EXPECT_THROW(Manifest::parse("novalue\n"), IoError);
}

TEST_F(TempDir, ModelRoundTrip)
{
    const DegradationModel model = make_model(8, 12, 6, 4, 6, equal_band_groups(6, 2));
    Manifest extra;
    extra.set("note", "x");
    save_model(dir_ / "model.txt", model, extra);
    const DegradationModel back = load_model(dir_ / "model.txt");
    EXPECT_EQ(back.p1, model.p1);
    EXPECT_EQ(back.p2, model.p2);
    EXPECT_EQ(back.p3, model.p3);
    EXPECT_EQ(back.spatial_factor, 4);
    EXPECT_EQ(back.kernel_size, 6);
    EXPECT_EQ(back.band_groups, model.band_groups);
    EXPECT_EQ(Manifest::load(dir_ / "model.txt").get("note"), "x");
}

TEST(BandGroups, FormatAndParse)
{
    const auto groups = equal_band_groups(90, 4);
    EXPECT_EQ(format_band_groups(groups), "1-23;24-46;47-68;69-90");
    EXPECT_EQ(parse_band_groups("1-23;24-46;47-68;69-90"), groups);
    EXPECT_EQ(parse_band_groups("1,3;2-2"), (std::vector<BandGroup>{{0, 2}, {1}}));
    EXPECT_THROW(parse_band_groups("3-1"), ArgumentError);
    EXPECT_THROW(parse_band_groups(""), ArgumentError);
}

TEST(FormatDouble, RoundTrips)
{
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 255.0}) EXPECT_EQ(std::stod(format_double(v)), v);
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
}
