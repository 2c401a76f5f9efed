#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "test_util.hpp"
#include "vrec/image_io.hpp"

using namespace vrec;

namespace {

std::string temp_path(const std::string& name) {
    return std::string("io_test_") + name;
}

}  // namespace

TEST_CASE("pgm round trip, 8 and 16 bit") {
    std::mt19937_64 rng(5);
    for (int depth : {8, 16}) {
        GrayImage img = testutil::random_image(33, 21, rng, depth);
        std::string path = temp_path("rt" + std::to_string(depth) + ".pgm");
        save_image(img, path);
        GrayImage back = load_image(path);
        CHECK(back.width() == img.width());
        CHECK(back.height() == img.height());
        CHECK(back.depth() == depth);
        CHECK(back.data() == img.data());
        std::remove(path.c_str());
    }
}

TEST_CASE("png round trip, 8 and 16 bit") {
    std::mt19937_64 rng(6);
    for (int depth : {8, 16}) {
        GrayImage img = testutil::random_image(17, 29, rng, depth);
        std::string path = temp_path("rt" + std::to_string(depth) + ".png");
        save_image(img, path);
        GrayImage back = load_image(path);
        CHECK(back.depth() == depth);
        CHECK(back.data() == img.data());
        std::remove(path.c_str());
    }
}

TEST_CASE("ascii pgm reads") {
    std::string path = temp_path("ascii.pgm");
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("P2\n# comment\n3 2\n255\n0 128 255\n10 20 30\n", f);
        std::fclose(f);
    }
    GrayImage img = load_image(path);
    CHECK(img.width() == 3);
    CHECK(img.height() == 2);
    CHECK(img.at(1, 0) == 128);
    CHECK(img.at(2, 1) == 30);
    std::remove(path.c_str());
}

TEST_CASE("mask serialization uses {0,255}") {
    std::mt19937_64 rng(8);
    BinaryMask m = testutil::random_mask(12, 9, 0.5, rng);
    std::string path = temp_path("mask.pgm");
    save_mask(m, path);
    GrayImage raw = load_image(path);
    for (size_t i = 0; i < raw.size(); ++i) CHECK((raw.data()[i] == 0 || raw.data()[i] == 255));
    BinaryMask back = load_mask(path);
    CHECK(back == m);
    std::remove(path.c_str());
}

TEST_CASE("missing file raises IoError") {
    CHECK_THROWS_AS(load_image("does_not_exist.pgm"), IoError);
}
