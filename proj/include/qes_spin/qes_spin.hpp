#pragma once

#include "algebra.hpp"
#include "analysis.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "models.hpp"
#include "oracle.hpp"
#include "polynomial.hpp"
#include "qes_engine.hpp"
#include "recursion.hpp"
#include "spin.hpp"
#include "verify.hpp"
