use rouxforge::families::ClosureCache;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::PathBuf;

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    digest: String,
    elements: Vec<Vec<u32>>,
}

fn digest_of(elements: &[Vec<u32>]) -> String {
    let mut h = Sha256::new();
    for e in elements {
        for &x in e {
            h.update(x.to_le_bytes());
        }
        h.update([0xff; 4]);
    }
    format!("{:x}", h.finalize())
}

/// One JSON file per closure, named by the SHA-256 of the key.
#[derive(Debug)]
pub struct FileCache {
    pub dir: PathBuf,
}

impl FileCache {
    pub fn from_env() -> Option<Self> {
        let dir = std::env::var_os("ROUXFORGE_CACHE").filter(|d| !d.is_empty())?;
        Some(FileCache { dir: dir.into() })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{:x}.json", Sha256::digest(key.as_bytes())))
    }
}

impl ClosureCache for FileCache {
    fn load(&self, key: &str) -> Option<Vec<Vec<u32>>> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let entry: Entry = serde_json::from_str(&text).ok()?;
        (entry.key == key && entry.digest == digest_of(&entry.elements)).then_some(entry.elements)
    }

    fn store(&self, key: &str, elements: &[Vec<u32>]) {
        if fs::create_dir_all(&self.dir).is_err() {
            return;
        }
        let entry = Entry { key: key.to_string(), digest: digest_of(elements), elements: elements.to_vec() };
        let path = self.path(key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        if let Ok(text) = serde_json::to_string(&entry) {
            if fs::write(&tmp, text).is_ok() {
                let _ = fs::rename(&tmp, &path);
            }
        }
    }
}
