var targets = [document.documentElement, document.body];
var saved = [];
for (var i = 0; i < targets.length; i++) {
  if (!targets[i]) continue;
  saved.push([targets[i], targets[i].style.scrollBehavior]);
  targets[i].style.scrollBehavior = 'auto';
}
window.scrollTo({ top: 0, left: 0, behavior: 'instant' });
for (var j = 0; j < saved.length; j++) saved[j][0].style.scrollBehavior = saved[j][1];
return [window.scrollX, window.scrollY];
