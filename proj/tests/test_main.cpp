#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "tbound/growth_checks.hpp"

namespace {

// Fails the run if a growth assertion fired, and leaves the counts for the
// acceptance binary.
class GrowthEnvironment : public ::testing::Environment {
 public:
  explicit GrowthEnvironment(std::string name) : name_(std::move(name)) {}

  void TearDown() override {
    auto& c = tbound::growth::counters();
    if (const char* dir = std::getenv("TBOUND_GROWTH_LOG")) {
      std::ofstream(std::string(dir) + "/" + name_ + ".log") << c.checked << " " << c.violated << "\n";
    }
    EXPECT_EQ(c.violated.load(), 0) << "growth assertions fired";
  }

 private:
  std::string name_;
};

}  // namespace

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  std::string name = argv[0];
  name = name.substr(name.find_last_of('/') + 1);
  ::testing::AddGlobalTestEnvironment(new GrowthEnvironment(name));
  return RUN_ALL_TESTS();
}
