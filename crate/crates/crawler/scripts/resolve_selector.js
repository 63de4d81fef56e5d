var found;
try {
  found = document.querySelectorAll(arguments[0]);
} catch (e) {
  return { found: false, visible: false };
}
if (found.length !== 1) return { found: false, visible: false };
return { found: true, visible: cdVisible(found[0]) };
