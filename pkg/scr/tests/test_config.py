"""
Testes da configuração e dos presets
"""
from scr.config import PRESETS_CONFIG, Config
from scr.models import DigitalOptionSpec, MarketParams, ProbabilityScheme


class TestConfig:
    def test_default_types(self):
        assert isinstance(Config.BARRIER_REL_TOL, float)
        assert isinstance(Config.ENUMERATION_MAX_STEPS, int)
        assert isinstance(Config.MC_BRIDGE, bool)
        assert all(isinstance(n, int) for n in Config.DEFAULT_N_VALUES)
        assert Config.DEFAULT_N_VALUES == sorted(Config.DEFAULT_N_VALUES)

    def test_probability_scheme_is_known(self):
        assert ProbabilityScheme(Config.PROBABILITY_SCHEME) in tuple(ProbabilityScheme)

    def test_database_lives_under_data_dir_by_default(self):
        assert str(Config.DATABASE_PATH).endswith('.db')


class TestPresets:
    def test_both_presets_present(self):
        assert set(PRESETS_CONFIG) == {'barrier-below-strike', 'barrier-above-strike'}

    def test_presets_build_valid_contracts(self):
        for name, cfg in PRESETS_CONFIG.items():
            market = MarketParams(**cfg['market'])
            spec = DigitalOptionSpec(**cfg['option'])
            assert spec.is_alive_at(market.s0), name

    def test_barrier_side_matches_name(self):
        below = PRESETS_CONFIG['barrier-below-strike']['option']
        above = PRESETS_CONFIG['barrier-above-strike']['option']
        assert below['barrier'] < below['strike']
        assert above['barrier'] > above['strike']
