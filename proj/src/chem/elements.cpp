#include "adcnet/chem/elements.hpp"

#include <array>

namespace adcnet::chem {
namespace {

struct ElementInfo {
  std::string_view symbol;
  double weight;
};

constexpr std::array<ElementInfo, kMaxAtomicNumber + 1> kElements = {{
    {"*", 0.0},        {"H", 1.008},      {"He", 4.0026},    {"Li", 6.94},
    {"Be", 9.0122},    {"B", 10.81},      {"C", 12.011},     {"N", 14.007},
    {"O", 15.999},     {"F", 18.998},     {"Ne", 20.180},    {"Na", 22.990},
    {"Mg", 24.305},    {"Al", 26.982},    {"Si", 28.085},    {"P", 30.974},
    {"S", 32.065},     {"Cl", 35.453},    {"Ar", 39.948},    {"K", 39.098},
    {"Ca", 40.078},    {"Sc", 44.956},    {"Ti", 47.867},    {"V", 50.942},
    {"Cr", 51.996},    {"Mn", 54.938},    {"Fe", 55.845},    {"Co", 58.933},
    {"Ni", 58.693},    {"Cu", 63.546},    {"Zn", 65.38},     {"Ga", 69.723},
    {"Ge", 72.630},    {"As", 74.922},    {"Se", 78.971},    {"Br", 79.904},
    {"Kr", 83.798},    {"Rb", 85.468},    {"Sr", 87.62},     {"Y", 88.906},
    {"Zr", 91.224},    {"Nb", 92.906},    {"Mo", 95.95},     {"Tc", 98.0},
    {"Ru", 101.07},    {"Rh", 102.91},    {"Pd", 106.42},    {"Ag", 107.87},
    {"Cd", 112.41},    {"In", 114.82},    {"Sn", 118.71},    {"Sb", 121.76},
    {"Te", 127.60},    {"I", 126.904},    {"Xe", 131.29},    {"Cs", 132.91},
    {"Ba", 137.33},    {"La", 138.91},    {"Ce", 140.12},    {"Pr", 140.91},
    {"Nd", 144.24},    {"Pm", 145.0},     {"Sm", 150.36},    {"Eu", 151.96},
    {"Gd", 157.25},    {"Tb", 158.93},    {"Dy", 162.50},    {"Ho", 164.93},
    {"Er", 167.26},    {"Tm", 168.93},    {"Yb", 173.05},    {"Lu", 174.97},
    {"Hf", 178.49},    {"Ta", 180.95},    {"W", 183.84},     {"Re", 186.21},
    {"Os", 190.23},    {"Ir", 192.22},    {"Pt", 195.08},    {"Au", 196.97},
    {"Hg", 200.59},    {"Tl", 204.38},    {"Pb", 207.2},     {"Bi", 208.98},
    {"Po", 209.0},     {"At", 210.0},     {"Rn", 222.0},     {"Fr", 223.0},
    {"Ra", 226.0},     {"Ac", 227.0},     {"Th", 232.04},    {"Pa", 231.04},
    {"U", 238.03},     {"Np", 237.0},     {"Pu", 244.0},     {"Am", 243.0},
    {"Cm", 247.0},     {"Bk", 247.0},     {"Cf", 251.0},     {"Es", 252.0},
    {"Fm", 257.0},     {"Md", 258.0},     {"No", 259.0},     {"Lr", 262.0},
    {"Rf", 267.0},     {"Db", 268.0},     {"Sg", 269.0},     {"Bh", 270.0},
    {"Hs", 277.0},     {"Mt", 278.0},     {"Ds", 281.0},     {"Rg", 282.0},
    {"Cn", 285.0},     {"Nh", 286.0},     {"Fl", 289.0},     {"Mc", 290.0},
    {"Lv", 293.0},     {"Ts", 294.0},     {"Og", 294.0},
}};

struct IsotopeInfo {
  int z;
  int a;
  double mass;
};

constexpr std::array<IsotopeInfo, 38> kIsotopes = {{
    {1, 1, 1.007825},    {1, 2, 2.014102},     {1, 3, 3.016049},     {6, 11, 11.011433},
    {6, 12, 12.0},       {6, 13, 13.003355},   {6, 14, 14.003242},   {7, 13, 13.005739},
    {7, 14, 14.003074},  {7, 15, 15.000109},   {8, 15, 15.003066},   {8, 16, 15.994915},
    {8, 17, 16.999132},  {8, 18, 17.999160},   {9, 18, 18.000938},   {9, 19, 18.998403},
    {15, 31, 30.973762}, {15, 32, 31.973907},  {16, 32, 31.972071},  {16, 34, 33.967867},
    {16, 35, 34.969032}, {17, 35, 34.968853},  {17, 37, 36.965903},  {35, 79, 78.918338},
    {35, 81, 80.916291}, {53, 123, 122.905589}, {53, 124, 123.906210}, {53, 125, 124.904630},
    {53, 127, 126.904473}, {53, 131, 130.906125}, {43, 99, 98.906255}, {31, 68, 67.927980},
    {29, 64, 63.929764}, {40, 89, 88.908890},  {39, 90, 89.907152},  {71, 177, 176.943758},
    {49, 111, 110.905103}, {85, 211, 210.987496},
}};

constexpr std::array<int, 1> kOne = {1};
constexpr std::array<int, 1> kTwo = {2};
constexpr std::array<int, 1> kThree = {3};
constexpr std::array<int, 1> kFour = {4};
constexpr std::array<int, 2> kThreeFive = {3, 5};
constexpr std::array<int, 3> kTwoFourSix = {2, 4, 6};
constexpr std::array<int, 3> kOneThreeFive = {1, 3, 5};
constexpr std::array<int, 4> kOddHalogen = {1, 3, 5, 7};

}  // namespace

std::optional<int> atomic_number(std::string_view symbol) noexcept {
  for (int z = 1; z <= kMaxAtomicNumber; ++z) {
    if (kElements[z].symbol == symbol) return z;
  }
  return std::nullopt;
}

std::string_view element_symbol(int z) noexcept {
  if (z < 0 || z > kMaxAtomicNumber) return "?";
  return kElements[z].symbol;
}

double standard_atomic_weight(int z) noexcept {
  if (z < 0 || z > kMaxAtomicNumber) return 0.0;
  return kElements[z].weight;
}

double isotope_mass(int z, int a) noexcept {
  for (const auto& iso : kIsotopes) {
    if (iso.z == z && iso.a == a) return iso.mass;
  }
  return static_cast<double>(a);
}

std::span<const int> default_valences(int z) noexcept {
  switch (z) {
    case 1: return kOne;
    case 5: return kThree;
    case 6: return kFour;
    case 7: return kThreeFive;
    case 8: return kTwo;
    case 9: return kOne;
    case 14: return kFour;
    case 15: return kThreeFive;
    case 16: return kTwoFourSix;
    case 17: return kOddHalogen;
    case 32: return kFour;
    case 33: return kThreeFive;
    case 34: return kTwoFourSix;
    case 35: return kOne;
    case 52: return kTwoFourSix;
    case 53: return kOneThreeFive;
    default: return {};
  }
}

}  // namespace adcnet::chem
