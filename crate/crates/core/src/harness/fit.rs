use std::fs::File;
use std::path::Path;

use crate::actuator::data::{
    read_clutch_anchors, read_hasel_data, HaselFitDocument, ModelsDocument,
};
use crate::actuator::{ClutchForceModel, ClutchSpec, HaselModel};
use crate::error::{Error, Result};

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Data {
        source_name: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })
}

/// Fits the clutch power law and/or the HASEL curve shape from
/// characterization CSVs. At least one file is required.
pub fn fit_models(clutch_csv: Option<&Path>, hasel_csv: Option<&Path>) -> Result<ModelsDocument> {
    if clutch_csv.is_none() && hasel_csv.is_none() {
        return Err(Error::invalid(
            "give at least one of the clutch and HASEL data files",
        ));
    }
    let clutch = match clutch_csv {
        Some(p) => {
            let anchors = read_clutch_anchors(&p.display().to_string(), open(p)?)?;
            Some(ClutchForceModel::fit(
                &anchors,
                ClutchSpec::default().electrode_overlap_area_cm2,
            )?)
        }
        None => None,
    };
    let hasel = match hasel_csv {
        Some(p) => {
            let data = read_hasel_data(&p.display().to_string(), open(p)?)?;
            let (model, report) = HaselModel::fit(&data.anchors, &data.points)?;
            Some(HaselFitDocument::new(&model, &data.points, &report))
        }
        None => None,
    };
    Ok(ModelsDocument { clutch, hasel })
}
