#pragma once

#include "decohere/errors.hpp"
#include "decohere/parallel.hpp"
#include "decohere/registers.hpp"
#include "decohere/environment.hpp"
#include "decohere/decoherence.hpp"
#include "decohere/oracle.hpp"
#include "decohere/density.hpp"
#include "decohere/shor.hpp"
#include "decohere/efficiency.hpp"
#include "decohere/io.hpp"
