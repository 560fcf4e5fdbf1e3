#!/usr/bin/env python3
"""
Script principal do motor de digitais com barreira

Exemplos:
    python run_harness.py price --preset barrier-below-strike --method crr --steps 400
    python run_harness.py converge --preset barrier-above-strike --methods crr,bil,analytic --out output/above.csv
    python run_harness.py expansion --preset barrier-below-strike
"""
import sys
from pathlib import Path

# Adiciona a raiz do projeto ao path
sys.path.insert(0, str(Path(__file__).parent))

from scr.cli import main

if __name__ == '__main__':
    sys.exit(main())
