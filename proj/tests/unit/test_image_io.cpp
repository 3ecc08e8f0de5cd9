#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "generators.hpp"
#include "guidefill/image_io.hpp"

using namespace guidefill;
using guidefill::testing::Rng;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(ImageIo, ByteConversionRoundTrips) {
  for (int b = 0; b < 256; ++b) EXPECT_EQ(to_byte(from_byte(static_cast<std::uint8_t>(b))), b);
  EXPECT_EQ(to_byte(-1.0f), 0);
  EXPECT_EQ(to_byte(2.0f), 255);
}

TEST(ImageIo, PngRoundTripIsExactOnBytes) {
  for (int channels : {1, 3, 4}) {
    Rng rng(static_cast<std::uint64_t>(channels));
    ImageBuffer img(17, 9, channels);
    for (float& v : img.values()) v = from_byte(static_cast<std::uint8_t>(rng.uniform_int(0, 255)));
    const ImageBuffer back = decode_png(encode_png(img));
    ASSERT_EQ(back.width(), 17);
    ASSERT_EQ(back.height(), 9);
    ASSERT_EQ(back.channels(), channels);
    EXPECT_EQ(back, img);
  }
}

TEST(ImageIo, PngEncodingIsDeterministic) {
  Rng rng(5);
  const ImageBuffer img = guidefill::testing::random_image(rng, 20, 20, 3);
  EXPECT_EQ(encode_png(img), encode_png(img));
}

TEST(ImageIo, GarbagePngIsIoError) {
  try {
    decode_png(bytes_of("not a png"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(ImageIo, MaskEncodingIsBitExact) {
  const auto bytes = bytes_of(std::string("P5\n3 1\n255\n") + std::string("\x00\x80\xff", 3));
  const LabelMask m = decode_mask_pgm(bytes);
  EXPECT_EQ(m.at(0, 0), Label::kReadable);
  EXPECT_EQ(m.at(1, 0), Label::kBystander);
  EXPECT_EQ(m.at(2, 0), Label::kInpaint);
  EXPECT_EQ(encode_mask_pgm(m), bytes);
}

TEST(ImageIo, MaskRoundTripProperty) {
  for (int t = 0; t < 30; ++t) {
    Rng rng(200 + t);
    const LabelMask m = guidefill::testing::random_mask(rng, rng.uniform_int(1, 40), rng.uniform_int(1, 40));
    EXPECT_EQ(decode_mask_pgm(encode_mask_pgm(m)), m);
  }
}

TEST(ImageIo, AsciiPgmAccepted) {
  const LabelMask m = decode_mask_pgm(bytes_of("P2\n# comment\n2 1\n255\n255 0\n"));
  EXPECT_EQ(m.at(0, 0), Label::kInpaint);
  EXPECT_EQ(m.at(1, 0), Label::kReadable);
}

TEST(ImageIo, MaskRejectsOtherValues) {
  EXPECT_THROW(decode_mask_pgm(bytes_of(std::string("P5\n1 1\n255\n") + "\x10")), Error);
  EXPECT_THROW(decode_mask_pgm(bytes_of("P5\n2 2\n255\n\x00")), Error);
  EXPECT_THROW(decode_mask_pgm(bytes_of("P6\n1 1\n255\n\x00\x00\x00")), Error);
}

TEST(ImageIo, MissingFileIsIoError) {
  try {
    read_png("/nonexistent/guidefill/x.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(ImageIo, FileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "guidefill_io_test";
  std::filesystem::create_directories(dir);
  LabelMask m(4, 3);
  m.set(1, 2, Label::kInpaint);
  write_mask_pgm(dir / "m.pgm", m);
  EXPECT_EQ(read_mask_pgm(dir / "m.pgm"), m);
  ImageBuffer img(4, 3, 3, from_byte(64));
  write_png(dir / "i.png", img);
  EXPECT_EQ(read_png(dir / "i.png"), img);
  std::filesystem::remove_all(dir);
}

TEST(ImageIo, ContentHashSeesDimensionsAndValues) {
  ImageBuffer a(4, 2, 1), b(2, 4, 1);
  EXPECT_NE(content_hash(a), content_hash(b));
  ImageBuffer c = a;
  c.at(1, 1, 0) = 0.5f;
  EXPECT_NE(content_hash(a), content_hash(c));
  EXPECT_EQ(content_hash(a), content_hash(ImageBuffer(4, 2, 1)));
  EXPECT_EQ(hex64(0xabcull), "0000000000000abc");
}
