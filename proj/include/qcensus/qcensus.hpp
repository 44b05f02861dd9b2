#pragma once

#include "arch.hpp"
#include "arith.hpp"
#include "asymptotics.hpp"
#include "cache.hpp"
#include "delta.hpp"
#include "errors.hpp"
#include "fft.hpp"
#include "form.hpp"
#include "lattice.hpp"
#include "lfunc.hpp"
#include "local.hpp"
#include "parallel.hpp"
#include "quad.hpp"
#include "ratfunc.hpp"
