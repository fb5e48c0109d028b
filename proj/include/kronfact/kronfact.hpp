#pragma once

// Umbrella header. report.hpp additionally needs nlohmann/json on the include
// path and is not pulled in here.

#include "kronfact/branches.hpp"
#include "kronfact/errors.hpp"
#include "kronfact/factorization.hpp"
#include "kronfact/generators.hpp"
#include "kronfact/io.hpp"
#include "kronfact/layout.hpp"
#include "kronfact/nkp.hpp"
#include "kronfact/number_theory.hpp"
#include "kronfact/pattern.hpp"
