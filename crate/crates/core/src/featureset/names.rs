use std::fmt;

/// The 24 daily inputs, in their fixed column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[allow(non_camel_case_types, clippy::upper_case_acronyms)]
pub enum FeatureName {
    AVG_PRICE_M,
    RET_MKT_M,
    TOTAL_TRADE,
    NBOQTY_BEFORE_CLOSE,
    NBBQTY_BEFORE_CLOSE,
    TOTAL_DOLLAR_M,
    ISO_DOLLAR,
    QUOTEDSPREAD_PERCENT_TW,
    BESTOFRDEPTH_DOLLAR_TW,
    BESTBIDDEPTH_DOLLAR_TW,
    BESTOFRDEPTH_SHARE_TW,
    BESTBIDDEPTH_SHARE_TW,
    EFFECTIVESPREAD_PERCENT_DW,
    PERCENTREALIZEDSPREAD_LR_DW,
    PERCENTPRICEIMPACT_LR_DW,
    BS_RATIO_VOL,
    TSIGNSQRTDVOL1,
    IVOL_Q,
    HINDEX,
    VAR_RATIO3,
    TOTAL_DV_RETAIL,
    BS_RATIO_RETAIL_VOL,
    TOTAL_DV_INST20K,
    BS_RATIO_INST20K_VOL,
}

pub const N_FEATURES: usize = 24;

impl FeatureName {
    pub const ALL: [FeatureName; N_FEATURES] = {
        use FeatureName::*;
        [
            AVG_PRICE_M,
            RET_MKT_M,
            TOTAL_TRADE,
            NBOQTY_BEFORE_CLOSE,
            NBBQTY_BEFORE_CLOSE,
            TOTAL_DOLLAR_M,
            ISO_DOLLAR,
            QUOTEDSPREAD_PERCENT_TW,
            BESTOFRDEPTH_DOLLAR_TW,
            BESTBIDDEPTH_DOLLAR_TW,
            BESTOFRDEPTH_SHARE_TW,
            BESTBIDDEPTH_SHARE_TW,
            EFFECTIVESPREAD_PERCENT_DW,
            PERCENTREALIZEDSPREAD_LR_DW,
            PERCENTPRICEIMPACT_LR_DW,
            BS_RATIO_VOL,
            TSIGNSQRTDVOL1,
            IVOL_Q,
            HINDEX,
            VAR_RATIO3,
            TOTAL_DV_RETAIL,
            BS_RATIO_RETAIL_VOL,
            TOTAL_DV_INST20K,
            BS_RATIO_INST20K_VOL,
        ]
    };

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        use FeatureName::*;
        match self {
            AVG_PRICE_M => "AVG_PRICE_M",
            RET_MKT_M => "RET_MKT_M",
            TOTAL_TRADE => "TOTAL_TRADE",
            NBOQTY_BEFORE_CLOSE => "NBOQTY_BEFORE_CLOSE",
            NBBQTY_BEFORE_CLOSE => "NBBQTY_BEFORE_CLOSE",
            TOTAL_DOLLAR_M => "TOTAL_DOLLAR_M",
            ISO_DOLLAR => "ISO_DOLLAR",
            QUOTEDSPREAD_PERCENT_TW => "QUOTEDSPREAD_PERCENT_TW",
            BESTOFRDEPTH_DOLLAR_TW => "BESTOFRDEPTH_DOLLAR_TW",
            BESTBIDDEPTH_DOLLAR_TW => "BESTBIDDEPTH_DOLLAR_TW",
            BESTOFRDEPTH_SHARE_TW => "BESTOFRDEPTH_SHARE_TW",
            BESTBIDDEPTH_SHARE_TW => "BESTBIDDEPTH_SHARE_TW",
            EFFECTIVESPREAD_PERCENT_DW => "EFFECTIVESPREAD_PERCENT_DW",
            PERCENTREALIZEDSPREAD_LR_DW => "PERCENTREALIZEDSPREAD_LR_DW",
            PERCENTPRICEIMPACT_LR_DW => "PERCENTPRICEIMPACT_LR_DW",
            BS_RATIO_VOL => "BS_RATIO_VOL",
            TSIGNSQRTDVOL1 => "TSIGNSQRTDVOL1",
            IVOL_Q => "IVOL_Q",
            HINDEX => "HINDEX",
            VAR_RATIO3 => "VAR_RATIO3",
            TOTAL_DV_RETAIL => "TOTAL_DV_RETAIL",
            BS_RATIO_RETAIL_VOL => "BS_RATIO_RETAIL_VOL",
            TOTAL_DV_INST20K => "TOTAL_DV_INST20K",
            BS_RATIO_INST20K_VOL => "BS_RATIO_INST20K_VOL",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|f| f.as_str() == s)
    }

    pub fn column_names() -> Vec<String> {
        Self::ALL.iter().map(|f| f.as_str().to_string()).collect()
    }
}

impl fmt::Display for FeatureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
