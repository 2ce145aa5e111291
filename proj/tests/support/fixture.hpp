#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("tourkit-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Three zones on a line, three tours: one direct, one distribution, one collection.
inline void write_three_tour_fixture(const std::filesystem::path& dir) {
  write_text(dir / "zones.csv",
             "zone_id,pc4,x_m,y_m,pc6_children\n"
             "Z1,1000,0,0,1000AA;1000AB\n"
             "Z2,1001,3000,4000,1001AA\n"
             "Z3,1002,6000,0,1002AA;1002AB\n");
  write_text(dir / "tours.csv",
             "tour_id,carrier_id,vehicle_type,day_of_week,departure_minute\n"
             "T1,C1,truck,0,400\n"
             "T2,C1,trailer,3,700\n"
             "T3,C2,truck,6,100\n");
  write_text(dir / "stops.csv",
             "tour_id,seq,zone_id,postcode,kind\n"
             "T1,1,Z1,1000AA,pickup\n"
             "T1,2,Z2,1001AA,delivery\n"
             "T2,1,Z1,1000,pickup\n"
             "T2,2,Z2,1001AA,delivery\n"
             "T2,3,Z3,1002AB,delivery\n"
             "T3,1,Z1,1000AB,pickup\n"
             "T3,2,Z2,1001AA,pickup\n"
             "T3,3,Z3,1002,delivery\n");
  write_text(dir / "shipments.csv",
             "shipment_id,tour_id,commodity_code,weight_kg,load_zone,unload_zone,empty_flag\n"
             "S1,T1,01,1000,Z1,Z2,0\n"
             "S2,T2,02,500,Z1,Z2,0\n"
             "S3,T2,03,700,Z1,Z3,0\n"
             "S4,T3,01,200,Z1,Z3,1\n"
             "S5,T3,04,300,Z2,Z3,0\n");
  write_text(dir / "travel_times.csv",
             "from_zone,to_zone,minutes\n"
             "Z1,Z2,10\nZ2,Z1,10\nZ2,Z3,10\nZ3,Z2,10\nZ1,Z3,12\nZ3,Z1,12\n");
}
