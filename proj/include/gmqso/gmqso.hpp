#pragma once

#include "gmqso/abelian.hpp"
#include "gmqso/analysis.hpp"
#include "gmqso/errors.hpp"
#include "gmqso/io.hpp"
#include "gmqso/qso.hpp"
#include "gmqso/report.hpp"
#include "gmqso/sampling.hpp"
#include "gmqso/scalar.hpp"
#include "gmqso/simplex.hpp"
